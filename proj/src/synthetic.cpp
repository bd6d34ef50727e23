#include "draftlmt/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "draftlmt/logistic.hpp"

namespace draftlmt {
namespace {

Example numeric_example(std::size_t i, std::vector<double> x, int label) {
  Example ex;
  ex.id = "s" + std::to_string(i);
  ex.x = std::move(x);
  ex.label = label;
  ex.sum_7yr_gp = label;
  ex.overall_pick = static_cast<int>(i + 1);
  return ex;
}

int draw_label(std::mt19937_64& rng, double log_odds) {
  return std::bernoulli_distribution(logistic(log_odds))(rng) ? 1 : 0;
}

}  // namespace

FeatureSchema numeric_schema(std::size_t width) {
  std::vector<FeatureDescriptor> features;
  for (std::size_t j = 0; j < width; ++j) {
    const std::string name = "x" + std::to_string(j);
    features.push_back({name, FeatureKind::kNumeric, name, ""});
  }
  return FeatureSchema(std::move(features));
}

Dataset linear_logistic_data(std::size_t n, const std::vector<double>& weights, double intercept,
                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Dataset data;
  data.schema = numeric_schema(weights.size());
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x(weights.size());
    double eta = intercept;
    for (std::size_t j = 0; j < x.size(); ++j) {
      x[j] = normal(rng);
      eta += weights[j] * x[j];
    }
    const int y = draw_label(rng, eta);
    data.rows.push_back(numeric_example(i, std::move(x), y));
  }
  return data;
}

Dataset two_regime_data(std::size_t n, std::uint64_t seed, std::size_t extra) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(0.0, 10.0);
  Dataset data;
  data.schema = numeric_schema(2 + extra);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x(2 + extra);
    x[0] = uniform(rng);
    for (std::size_t j = 1; j < x.size(); ++j) x[j] = normal(rng);
    const int y = draw_label(rng, x[0] < 5.0 ? 2.0 * x[1] : -2.0 * x[1]);
    data.rows.push_back(numeric_example(i, std::move(x), y));
  }
  return data;
}

Dataset noise_data(std::size_t n, std::size_t width, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Dataset data;
  data.schema = numeric_schema(width);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x(width);
    for (auto& v : x) v = normal(rng);
    const int y = draw_label(rng, 0.0);
    data.rows.push_back(numeric_example(i, std::move(x), y));
  }
  return data;
}

std::vector<RawRow> synthetic_draft_rows(const std::vector<int>& years, std::size_t per_year,
                                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;
  const std::vector<std::pair<std::string, double>> countries = {
      {"CAN", 0.45}, {"USA", 0.2}, {"SWE", 0.1}, {"FIN", 0.08}, {"RUS", 0.1}, {"CZE", 0.07}};
  const std::vector<std::string> positions = {"C", "LW", "RW", "D", "D", "C", "G"};

  std::vector<RawRow> out;
  for (const int year : years) {
    struct Prospect {
      RawRow row;
      double talent;
    };
    std::vector<Prospect> cohort;
    for (std::size_t k = 0; k < per_year; ++k) {
      RawRow r;
      r.id = std::to_string(year) + "-" + std::to_string(k + 1);
      r.draft_year = year;
      r.draft_age = uniform(rng) < 0.7 ? 18 : 19;
      double u = uniform(rng);
      r.country = countries.back().first;
      for (const auto& [name, p] : countries) {
        if (u < p) {
          r.country = name;
          break;
        }
        u -= p;
      }
      r.position = positions[static_cast<std::size_t>(uniform(rng) * positions.size())];
      const double talent = normal(rng);
      const double scoring = r.position == "D" ? 0.55 : 1.0;
      r.height_cm = std::round(185 + 5 * normal(rng));
      r.weight_kg = std::round(88 + 0.8 * (r.height_cm - 185) + 5 * normal(rng));
      r.rs.gp = std::round(std::clamp(60 + 8 * normal(rng), 20.0, 72.0));
      r.rs.goals = std::max(0.0, std::round(scoring * (22 + 9 * talent + 6 * normal(rng))));
      r.rs.assists = std::max(0.0, std::round(scoring * (28 + 11 * talent + 7 * normal(rng))));
      r.rs.points = r.rs.goals + r.rs.assists;
      r.rs.pim = std::max(0.0, std::round(50 + 25 * normal(rng)));
      r.rs.plus_minus = std::round(4 * talent + 10 * normal(rng));
      if (uniform(rng) < 0.6) {
        r.po.gp = std::round(4 + 14 * uniform(rng));
        r.po.goals = std::max(0.0, std::round(r.po.gp * (0.3 + 0.1 * talent) + normal(rng)));
        r.po.assists = std::max(0.0, std::round(r.po.gp * (0.4 + 0.1 * talent) + normal(rng)));
        r.po.points = r.po.goals + r.po.assists;
        r.po.pim = std::max(0.0, std::round(r.po.gp * 1.2 + 3 * normal(rng)));
        r.po.plus_minus = std::round(2 * talent + 3 * normal(rng));
      }
      cohort.push_back({std::move(r), talent});
    }

    // Scouting ranks and pick order are noisy views of talent.
    std::vector<std::size_t> order(cohort.size());
    std::vector<double> scout(cohort.size()), team(cohort.size());
    for (std::size_t k = 0; k < cohort.size(); ++k) {
      scout[k] = cohort[k].talent + 0.5 * normal(rng);
      team[k] = cohort[k].talent + 0.7 * normal(rng);
    }
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scout[a] > scout[b]; });
    for (std::size_t r = 0; r < order.size(); ++r) {
      auto& row = cohort[order[r]].row;
      // Deep prospects are often left unranked.
      if (r < 60 || uniform(rng) > 0.15) row.css_rank = static_cast<int>(r + 1);
    }
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return team[a] > team[b]; });
    for (std::size_t r = 0; r < order.size(); ++r) cohort[order[r]].row.overall_pick = static_cast<int>(r + 1);

    for (auto& [row, talent] : cohort) {
      double eta;
      if (row.css_rank && *row.css_rank <= 60) {
        eta = 1.0 + 0.08 * (row.rs.points - 50);
      } else {
        eta = -1.0 - 0.15 * row.rs.plus_minus + 0.1 * (row.height_cm - 185);
      }
      if (draw_label(rng, eta)) {
        row.sum_7yr_gp = std::round(1 + 400 * uniform(rng) * uniform(rng));
        row.sum_7yr_toi = std::round(row.sum_7yr_gp * (12 + 6 * uniform(rng)));
      }
      row.played_flag = row.sum_7yr_gp > 0;
      if (row.position != "G" && uniform(rng) < 0.03) {
        // Traded mid-season: two partial lines summing to the season.
        RawRow first = row;
        const double share = 0.5;
        first.rs.gp = std::round(row.rs.gp * share);
        first.rs.goals = std::round(row.rs.goals * share);
        first.rs.assists = std::round(row.rs.assists * share);
        first.rs.points = first.rs.goals + first.rs.assists;
        first.rs.pim = std::round(row.rs.pim * share);
        first.rs.plus_minus = std::round(row.rs.plus_minus * share);
        first.po = {};
        row.rs.gp -= first.rs.gp;
        row.rs.goals -= first.rs.goals;
        row.rs.assists -= first.rs.assists;
        row.rs.points -= first.rs.points;
        row.rs.pim -= first.rs.pim;
        row.rs.plus_minus -= first.rs.plus_minus;
        out.push_back(std::move(first));
      }
      out.push_back(std::move(row));
    }
  }
  return out;
}

std::string to_csv(const std::vector<RawRow>& rows) {
  std::ostringstream out;
  out.precision(17);
  const auto& fields = ColumnMap::required_fields();
  for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i];
  out << '\n';
  auto stats = [&](const SeasonStats& s) {
    out << ',' << s.gp << ',' << s.goals << ',' << s.assists << ',' << s.points << ',' << s.pim << ','
        << s.plus_minus;
  };
  for (const auto& r : rows) {
    out << r.id << ',' << r.draft_year << ',' << r.draft_age << ',' << r.country << ','
        << r.position << ',' << r.overall_pick << ',';
    if (r.css_rank) {
      out << *r.css_rank;
    } else {
      out << "NA";
    }
    out << ',' << r.height_cm << ',' << r.weight_kg;
    stats(r.rs);
    stats(r.po);
    out << ',' << r.sum_7yr_gp << ',' << r.sum_7yr_toi << ',' << (r.played_flag ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace draftlmt
