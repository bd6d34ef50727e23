#include "draftlmt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "draftlmt/error.hpp"

namespace draftlmt {
namespace {

std::ostringstream csv_stream() {
  std::ostringstream out;
  out.precision(17);
  return out;
}

std::vector<Contribution> ranked(const std::vector<double>& c, const FeatureSchema& schema,
                                 std::size_t k, bool descending) {
  std::vector<std::size_t> order(c.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return descending ? c[a] > c[b] : c[a] < c[b];
  });
  std::vector<Contribution> out;
  for (std::size_t i = 0; i < std::min(k, order.size()); ++i) {
    out.push_back({order[i], schema[order[i]].name, c[order[i]]});
  }
  return out;
}

}  // namespace

double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw ValidationError("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Quartiles quartiles(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return {values.front(), quantile(values, 0.25), quantile(values, 0.5), quantile(values, 0.75),
          values.back()};
}

std::vector<GroupProfile> profile_groups(const ModelTree& tree, const Dataset& data) {
  const auto groups = tree.partition(data);
  std::vector<GroupProfile> out;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    GroupProfile p;
    p.group_id = static_cast<int>(g + 1);
    p.n = groups[g].size();
    if (p.n == 0) {
      out.push_back(std::move(p));
      continue;
    }
    p.mean_features.assign(data.schema.width(), 0.0);
    std::vector<double> games;
    double played = 0;
    for (const auto i : groups[g]) {
      const auto& row = data.rows[i];
      for (std::size_t j = 0; j < row.x.size(); ++j) p.mean_features[j] += row.x[j];
      games.push_back(row.sum_7yr_gp);
      played += row.label;
      ++p.position_counts[row.position];
    }
    for (auto& m : p.mean_features) m /= static_cast<double>(p.n);
    p.prop_played = played / static_cast<double>(p.n);
    p.gp_quartiles = quartiles(std::move(games));
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<ProportionBin> proportion_curve(const Dataset& data, std::span<const std::size_t> rows,
                                            std::size_t feature, const Binning& binning) {
  if (!(binning.width > 0) || !std::isfinite(binning.width)) {
    throw ValidationError("proportion curve bins must have positive width");
  }
  if (feature >= data.schema.width()) throw ValidationError("unknown feature index");
  if (rows.empty()) throw ValidationError("proportion curve over no players");
  std::map<long long, std::pair<std::size_t, std::size_t>> bins;  // index -> (count, played)
  for (const auto i : rows) {
    const auto& row = data.rows[i];
    const auto k = static_cast<long long>(std::floor((row.x[feature] - binning.origin) / binning.width));
    auto& [count, played] = bins[k];
    ++count;
    played += row.sum_7yr_gp > 0 ? 1 : 0;
  }
  std::vector<ProportionBin> out;
  for (const auto& [k, cp] : bins) {
    const auto [count, played] = cp;
    out.push_back({binning.origin + (static_cast<double>(k) + 0.5) * binning.width,
                   static_cast<double>(played) / static_cast<double>(count), count,
                   count < binning.min_support});
  }
  return out;
}

std::vector<ProportionBin> proportion_curve(const Dataset& data, std::size_t feature,
                                            const Binning& binning) {
  std::vector<std::size_t> all(data.size());
  std::iota(all.begin(), all.end(), 0);
  return proportion_curve(data, all, feature, binning);
}

double outcome_correlation(const Dataset& data, std::span<const std::size_t> rows,
                           std::size_t feature) {
  if (rows.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0, my = 0;
  for (const auto i : rows) {
    mx += data.rows[i].x[feature];
    my += data.rows[i].sum_7yr_gp;
  }
  mx /= static_cast<double>(rows.size());
  my /= static_cast<double>(rows.size());
  double sxy = 0, sxx = 0, syy = 0;
  for (const auto i : rows) {
    const double dx = data.rows[i].x[feature] - mx;
    const double dy = data.rows[i].sum_7yr_gp - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0 || syy == 0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

Attribution attribute(const Example& player, const GroupProfile& profile,
                      const LogisticModel& model, const FeatureSchema& schema, std::size_t k) {
  if (k == 0) throw ValidationError("attribution needs k >= 1");
  if (player.x.size() != schema.width() || model.width() != schema.width() ||
      profile.mean_features.size() != schema.width()) {
    throw SchemaMismatchError("player, group profile and model disagree on the feature count");
  }
  Attribution a;
  a.id = player.id;
  a.group_id = profile.group_id;
  a.contributions.resize(schema.width());
  for (std::size_t j = 0; j < schema.width(); ++j) {
    a.contributions[j] =
        model.weights()[j] * (player.x[j] - profile.mean_features[j]) / model.scaling()[j].scale;
    a.total += a.contributions[j];
  }
  a.strongest = ranked(a.contributions, schema, k, true);
  a.weakest = ranked(a.contributions, schema, k, false);
  return a;
}

Attribution explain(const ModelTree& tree, const std::vector<GroupProfile>& profiles,
                    const Example& player, std::size_t k) {
  const int group = tree.assign_group(player.x);
  const auto it = std::find_if(profiles.begin(), profiles.end(),
                               [&](const GroupProfile& p) { return p.group_id == group; });
  if (it == profiles.end() || !it->defined()) {
    throw ValidationError("group " + std::to_string(group) + " has no reference players");
  }
  return attribute(player, *it, tree.leaf_for_group(group).model, tree.schema(), k);
}

std::vector<GroupTopPlayers> top_players(const ModelTree& tree, const Dataset& data,
                                         const std::vector<GroupProfile>& profiles,
                                         std::size_t per_group, std::size_t k) {
  const auto groups = tree.partition(data);
  std::vector<GroupTopPlayers> out;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    GroupTopPlayers entry;
    entry.group_id = static_cast<int>(g + 1);
    std::vector<std::pair<double, std::size_t>> scored;
    for (const auto i : groups[g]) scored.emplace_back(tree.predict(data.rows[i].x), i);
    std::stable_sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return data.rows[a.second].id < data.rows[b.second].id;
    });
    for (std::size_t r = 0; r < std::min(per_group, scored.size()); ++r) {
      const auto& row = data.rows[scored[r].second];
      entry.players.push_back(
          {row.id, row.draft_year, scored[r].first, explain(tree, profiles, row, k)});
    }
    out.push_back(std::move(entry));
  }
  return out;
}

std::vector<GroupTopPlayers> top_players(const ModelTree& tree, const Dataset& data,
                                         std::size_t per_group, std::size_t k) {
  return top_players(tree, data, profile_groups(tree, data), per_group, k);
}

std::string boxplot_csv(const std::vector<GroupProfile>& profiles) {
  auto out = csv_stream();
  out << "group,n,prop_played,gp_min,gp_q1,gp_median,gp_q3,gp_max\n";
  for (const auto& p : profiles) {
    out << p.group_id << ',' << p.n << ',' << p.prop_played;
    if (p.gp_quartiles) {
      const auto& q = *p.gp_quartiles;
      out << ',' << q.min << ',' << q.q1 << ',' << q.median << ',' << q.q3 << ',' << q.max;
    } else {
      out << ",,,,,";
    }
    out << '\n';
  }
  return out.str();
}

std::string group_means_csv(const std::vector<GroupProfile>& profiles, const FeatureSchema& schema) {
  auto out = csv_stream();
  out << "group,n";
  for (const auto& f : schema.features()) out << ',' << f.name;
  out << '\n';
  std::size_t total = 0;
  std::vector<double> overall(schema.width(), 0.0);
  for (const auto& p : profiles) {
    out << p.group_id << ',' << p.n;
    for (std::size_t j = 0; j < schema.width(); ++j) {
      out << ',';
      if (p.defined()) {
        out << p.mean_features[j];
        overall[j] += p.mean_features[j] * static_cast<double>(p.n);
      }
    }
    total += p.n;
    out << '\n';
  }
  out << "all," << total;
  for (const double s : overall) out << ',' << (total ? s / static_cast<double>(total) : 0.0);
  out << '\n';
  return out.str();
}

std::string weight_table_csv(const ModelTree& tree) {
  auto out = csv_stream();
  const auto leaves = tree.leaves();
  out << "feature";
  for (std::size_t g = 0; g < leaves.size(); ++g) out << ",group_" << g + 1;
  out << '\n';
  out << "(intercept)";
  for (const auto i : leaves) out << ',' << tree.node(i).model.intercept();
  out << '\n';
  for (std::size_t j = 0; j < tree.schema().width(); ++j) {
    out << tree.schema()[j].name;
    for (const auto i : leaves) out << ',' << tree.node(i).model.weights()[j];
    out << '\n';
  }
  return out.str();
}

std::string position_distribution_csv(const std::vector<GroupProfile>& profiles) {
  auto out = csv_stream();
  out << "group,position,count,fraction\n";
  for (const auto& p : profiles) {
    for (const auto& level : FeatureSchema::position_levels()) {
      const auto it = p.position_counts.find(level);
      const std::size_t c = it == p.position_counts.end() ? 0 : it->second;
      out << p.group_id << ',' << level << ',' << c << ','
          << (p.n ? static_cast<double>(c) / static_cast<double>(p.n) : 0.0) << '\n';
    }
  }
  return out.str();
}

std::string proportion_curves_csv(const ModelTree& tree, const Dataset& data,
                                  const std::vector<std::string>& features,
                                  const Binning& binning) {
  auto out = csv_stream();
  out << "group,feature,bin_center,proportion_played,count,low_support\n";
  const auto groups = tree.partition(data);
  std::vector<std::size_t> all(data.size());
  std::iota(all.begin(), all.end(), 0);
  for (const auto& name : features) {
    const auto j = data.schema.index_of(name);
    if (!j) continue;
    for (std::size_t g = 0; g <= groups.size(); ++g) {
      const auto& rows = g == 0 ? all : groups[g - 1];
      if (rows.empty()) continue;
      for (const auto& b : proportion_curve(data, rows, *j, binning)) {
        out << g << ',' << name << ',' << b.center << ',' << b.proportion << ',' << b.count << ','
            << (b.low_support ? 1 : 0) << '\n';
      }
    }
  }
  return out.str();
}

}  // namespace draftlmt
