#include "draftlmt/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "draftlmt/error.hpp"

namespace draftlmt {
namespace {

// Paired ranks (x_i, y_i) over the ids of x.
std::pair<std::vector<double>, std::vector<double>> paired_ranks(const Ranking& x,
                                                                 const Ranking& y) {
  if (x.size() != y.size()) throw ValidationError("rankings cover different numbers of ids");
  std::unordered_map<std::string, double> y_rank;
  y_rank.reserve(y.size());
  for (const auto& e : y.entries) y_rank.emplace(e.id, e.rank);
  std::vector<double> a, b;
  a.reserve(x.size());
  b.reserve(x.size());
  for (const auto& e : x.entries) {
    const auto it = y_rank.find(e.id);
    if (it == y_rank.end()) throw ValidationError("id " + e.id + " missing from second ranking");
    a.push_back(e.rank);
    b.push_back(it->second);
  }
  return {std::move(a), std::move(b)};
}

}  // namespace

bool Ranking::has_ties() const {
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].rank == entries[i - 1].rank) return true;
  }
  return false;
}

Ranking rank_by(std::span<const std::pair<std::string, double>> scores, RankDirection direction) {
  if (scores.empty()) throw ValidationError("cannot rank an empty list");
  Ranking out;
  out.direction = direction;
  out.entries.reserve(scores.size());
  for (const auto& [id, score] : scores) {
    if (std::isnan(score)) throw ValidationError("score of " + id + " is NaN");
    out.entries.push_back({id, score, 0.0});
  }
  std::sort(out.entries.begin(), out.entries.end(), [&](const RankEntry& a, const RankEntry& b) {
    if (a.score != b.score) {
      return direction == RankDirection::kDescending ? a.score > b.score : a.score < b.score;
    }
    return a.id < b.id;
  });
  std::size_t start = 0;
  while (start < out.entries.size()) {
    std::size_t end = start + 1;
    while (end < out.entries.size() && out.entries[end].score == out.entries[start].score) ++end;
    // Positions start+1 .. end share their average.
    const double rank = (static_cast<double>(start + 1) + static_cast<double>(end)) / 2.0;
    for (std::size_t i = start; i < end; ++i) out.entries[i].rank = rank;
    start = end;
  }
  std::vector<std::string> ids;
  ids.reserve(out.entries.size());
  for (const auto& e : out.entries) ids.push_back(e.id);
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw ValidationError("ranking ids must be unique");
  }
  return out;
}

double spearman_d2(const Ranking& x, const Ranking& y) {
  const auto [a, b] = paired_ranks(x, y);
  const double n = static_cast<double>(a.size());
  if (a.size() < 2) throw ValidationError("rank correlation needs at least 2 ids");
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

double spearman_pearson(const Ranking& x, const Ranking& y) {
  const auto [a, b] = paired_ranks(x, y);
  if (a.size() < 2) throw ValidationError("rank correlation needs at least 2 ids");
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) {
    throw ValidationError("rank correlation is undefined for a constant ranking");
  }
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double accuracy(std::span<const double> probabilities, std::span<const int> labels) {
  if (probabilities.size() != labels.size()) {
    throw ValidationError("accuracy: predictions and labels differ in length");
  }
  if (probabilities.empty()) throw ValidationError("accuracy of an empty set");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int predicted = probabilities[i] >= 0.5 ? 1 : 0;
    if (predicted == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

Evaluation evaluate_with_rankings(const ModelTree& tree, const Dataset& test) {
  tree.check_schema(test.schema);
  if (test.empty()) throw ValidationError("test set is empty");

  std::set<std::string> unique;
  for (const auto& row : test.rows) unique.insert(row.id);
  const bool composite = unique.size() != test.size();
  auto key = [&](const Example& row) {
    return composite ? row.id + "@" + std::to_string(row.draft_year) : row.id;
  };

  std::vector<std::pair<std::string, double>> model_scores, games, picks;
  std::vector<double> probabilities;
  std::vector<int> labels;
  for (const auto& row : test.rows) {
    const double p = tree.predict(row.x);
    probabilities.push_back(p);
    labels.push_back(row.label);
    model_scores.emplace_back(key(row), p);
    games.emplace_back(key(row), row.sum_7yr_gp);
    picks.emplace_back(key(row), static_cast<double>(row.overall_pick));
  }
  const Ranking model_rank = rank_by(model_scores, RankDirection::kDescending);
  const Ranking games_rank = rank_by(games, RankDirection::kDescending);
  const Ranking draft_rank = rank_by(picks, RankDirection::kAscending);

  Evaluation out;
  auto& r = out.report;
  r.train_years = tree.training_years();
  r.test_years = test.years();
  r.n_test = test.size();
  r.draft_order_src = spearman_d2(draft_rank, games_rank);
  r.model_src = spearman_d2(model_rank, games_rank);
  r.model_accuracy = accuracy(probabilities, labels);
  r.draft_order_pearson_ranks = spearman_pearson(draft_rank, games_rank);
  r.model_pearson_ranks = spearman_pearson(model_rank, games_rank);
  r.outcome_ties = games_rank.has_ties();
  r.model_ties = model_rank.has_ties();
  r.draft_order_ties = draft_rank.has_ties();
  for (const int year : r.test_years) {
    if (r.train_years.contains(year)) r.in_sample = true;
  }
  r.overall_in_features = test.schema.uses_source("Overall");
  r.schema_hash = test.schema.hash();

  auto rank_map = [](const Ranking& ranking) {
    std::unordered_map<std::string, double> m;
    for (const auto& e : ranking.entries) m.emplace(e.id, e.rank);
    return m;
  };
  const auto mr = rank_map(model_rank);
  const auto gr = rank_map(games_rank);
  const auto dr = rank_map(draft_rank);
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto& row = test.rows[i];
    const auto k = key(row);
    out.rows.push_back({row.id, row.draft_year, probabilities[i], mr.at(k), gr.at(k), dr.at(k)});
  }
  return out;
}

EvaluationReport evaluate(const ModelTree& tree, const Dataset& test) {
  return evaluate_with_rankings(tree, test).report;
}

std::string ranking_csv(const std::vector<RankingRow>& rows) {
  std::ostringstream out;
  out.precision(17);
  out << "id,draft_year,probability,model_rank,games_rank,draft_rank\n";
  for (const auto& r : rows) {
    out << r.id << ',' << r.draft_year << ',' << r.probability << ',' << r.model_rank << ','
        << r.games_rank << ',' << r.draft_rank << '\n';
  }
  return out.str();
}

}  // namespace draftlmt
