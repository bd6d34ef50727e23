#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "draftlmt/dataset.hpp"
#include "draftlmt/logistic.hpp"

namespace draftlmt {

enum class SplitKind { kNumeric, kCategory };

// Binary split. Rows with x[feature] < threshold go left, the rest go right.
// A category split tests a one-hot column with threshold 0.5: members of
// `level` go right.
struct Split {
  std::size_t feature = 0;
  SplitKind kind = SplitKind::kNumeric;
  double threshold = 0.0;
  std::string level;
  double gain = 0.0;  // relative gain at selection time; 0 for loaded trees

  bool goes_left(std::span<const double> x) const { return x[feature] < threshold; }
  bool operator==(const Split&) const = default;
};

enum class SplitCriterion {
  // Log-likelihood gain of giving each child its own linear-logistic model:
  // exact for the per-child intercepts, second order (one Newton step from
  // the child's base rate) for the slopes.
  kLinearLikelihood,
  // Class-entropy gain on the label (C4.5).
  kEntropy,
};

std::string to_string(SplitCriterion criterion);
SplitCriterion parse_split_criterion(std::string_view text);

struct TreeConfig {
  std::size_t min_leaf = 10;
  std::size_t min_split = 30;
  double min_gain = 1e-3;  // relative to the node's constant-model log-loss
  int max_depth = 6;
  std::size_t max_leaves = 64;
  int boost_stages = 20;
  int prune_folds = 5;  // < 2 disables pruning in train()
  double ridge = 1e-6;
  double split_ridge = 1.0;  // regularizes slope terms of the split criterion
  std::uint64_t seed = 42;
  SplitCriterion criterion = SplitCriterion::kLinearLikelihood;

  bool operator==(const TreeConfig&) const = default;
};

struct TreeNode {
  std::optional<Split> split;
  std::size_t left = 0;
  std::size_t right = 0;

  int group_id = 0;
  LogisticModel model;
  std::size_t n = 0;
  double prop_played = 0.0;

  // LogitBoost model fitted while growing; not serialized.
  std::optional<AdditiveStageModel> growth_model;

  bool is_leaf() const { return !split.has_value(); }
};

class ModelTree {
 public:
  ModelTree() = default;
  // `nodes[0]` is the root. Group ids are reassigned left to right.
  ModelTree(FeatureSchema schema, std::vector<TreeNode> nodes, TreeConfig config = {},
            std::set<int> training_years = {});

  const FeatureSchema& schema() const { return schema_; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& node(std::size_t i) const { return nodes_.at(i); }
  const TreeConfig& config() const { return config_; }
  const std::set<int>& training_years() const { return training_years_; }
  void set_training_years(std::set<int> years) { training_years_ = std::move(years); }

  std::size_t leaf_count() const;
  int depth() const;
  // Leaf node indices in left-to-right order; position k holds group k + 1.
  std::vector<std::size_t> leaves() const;
  const TreeNode& leaf_for_group(int group_id) const;

  std::size_t leaf_index(std::span<const double> x) const;
  int assign_group(std::span<const double> x) const;
  double predict(std::span<const double> x) const;
  double log_odds(std::span<const double> x) const;

  // Row indices of `data` routed to each group (index k -> group k + 1).
  std::vector<std::vector<std::size_t>> partition(const Dataset& data) const;

  void check_schema(const FeatureSchema& schema) const;

 private:
  void check_width(std::size_t n) const;
  void number_groups();

  FeatureSchema schema_;
  std::vector<TreeNode> nodes_;
  TreeConfig config_;
  std::set<int> training_years_;
};

// Best admissible split of the given rows, or nullopt. Candidate numeric
// thresholds are midpoints between consecutive distinct values; one-hot
// columns give one-level-vs-rest splits. Equal gains resolve to the lowest
// feature index, then the lowest threshold.
std::optional<Split> select_split(const Dataset& data, std::span<const std::size_t> rows,
                                  const TreeConfig& config);
std::optional<Split> select_split(const Dataset& data, const TreeConfig& config);

// Unpruned structure with growth-time LogitBoost models at every node and
// leaves refit by maximum likelihood.
ModelTree grow(const Dataset& data, const TreeConfig& config);

// Replaces every leaf model by fit_mle on the rows routed to it.
ModelTree refit_leaves(const ModelTree& tree, const Dataset& data);

// Refits LogitBoost models along the existing structure, each child
// continuing from its parent's additive model.
ModelTree fit_growth_models(const ModelTree& tree, const Dataset& data);

struct PruneReport {
  std::vector<double> alphas;
  std::vector<std::size_t> leaf_counts;
  std::vector<double> cv_loss;  // mean held-out log-loss per alpha
  std::vector<double> cv_se;
  std::size_t best = 0;    // minimum cv_loss
  std::size_t chosen = 0;  // largest alpha within one standard error of best
};

struct PruneResult {
  ModelTree tree;
  PruneReport report;
};

// Cost-complexity pruning of the growth-time model tree with the complexity
// parameter chosen by stratified k-fold cross-validated log-loss and the
// one-standard-error rule. Leaves of the result are refit by maximum
// likelihood. Throws ValidationError for folds < 2.
PruneResult prune_with_report(const ModelTree& tree, const Dataset& data, int folds);
ModelTree prune(const ModelTree& tree, const Dataset& data, int folds);

// grow, then prune when config.prune_folds >= 2. The result is tagged with
// the dataset's draft years.
ModelTree train(const Dataset& data, const TreeConfig& config);

// Mean log-loss of the tree's leaf models over a dataset.
double mean_log_loss(const ModelTree& tree, const Dataset& data);

}  // namespace draftlmt
