#pragma once

#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "draftlmt/dataset.hpp"
#include "draftlmt/tree.hpp"

namespace draftlmt {

enum class RankDirection {
  kDescending,  // highest score gets rank 1
  kAscending,   // lowest score gets rank 1
};

struct RankEntry {
  std::string id;
  double score = 0.0;
  double rank = 0.0;
};

// Entries are in rank order; tied scores share the average of their
// positions and are listed by id.
struct Ranking {
  std::vector<RankEntry> entries;
  RankDirection direction = RankDirection::kDescending;

  std::size_t size() const { return entries.size(); }
  bool has_ties() const;
};

// Throws ValidationError on an empty input, a NaN score or a repeated id.
Ranking rank_by(std::span<const std::pair<std::string, double>> scores, RankDirection direction);

// 1 - 6 sum d^2 / (n (n^2 - 1)) over ids paired between the rankings.
double spearman_d2(const Ranking& x, const Ranking& y);

// Pearson correlation of the paired ranks. Throws when either ranking is
// constant.
double spearman_pearson(const Ranking& x, const Ranking& y);

// Fraction of rows where (p >= 0.5) equals the label.
double accuracy(std::span<const double> probabilities, std::span<const int> labels);

struct EvaluationReport {
  std::set<int> train_years;
  std::set<int> test_years;
  std::size_t n_test = 0;
  double draft_order_src = 0.0;
  double model_src = 0.0;
  double model_accuracy = 0.0;
  double draft_order_pearson_ranks = 0.0;
  double model_pearson_ranks = 0.0;
  bool outcome_ties = false;
  bool model_ties = false;
  bool draft_order_ties = false;
  bool in_sample = false;
  bool overall_in_features = false;
  std::string schema_hash;
};

struct RankingRow {
  std::string id;
  int draft_year = 0;
  double probability = 0.0;
  double model_rank = 0.0;
  double games_rank = 0.0;
  double draft_rank = 0.0;
};

struct Evaluation {
  EvaluationReport report;
  std::vector<RankingRow> rows;  // in test-set order
};

// Model ranking by descending probability, outcome ranking by descending
// sum_7yr_GP (zero-game players tie), draft ranking by ascending pick.
// Throws SchemaMismatchError when the schemas differ.
Evaluation evaluate_with_rankings(const ModelTree& tree, const Dataset& test);
EvaluationReport evaluate(const ModelTree& tree, const Dataset& test);

std::string ranking_csv(const std::vector<RankingRow>& rows);

}  // namespace draftlmt
