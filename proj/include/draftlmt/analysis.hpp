#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "draftlmt/dataset.hpp"
#include "draftlmt/logistic.hpp"
#include "draftlmt/tree.hpp"

namespace draftlmt {

struct Quartiles {
  double min = 0;
  double q1 = 0;
  double median = 0;
  double q3 = 0;
  double max = 0;
};

// Linear interpolation between closest ranks (h = (n - 1) q). `sorted` must
// be ascending and non-empty.
double quantile(const std::vector<double>& sorted, double q);
Quartiles quartiles(std::vector<double> values);

struct GroupProfile {
  int group_id = 0;
  std::size_t n = 0;
  std::vector<double> mean_features;  // raw scale; empty when n == 0
  double prop_played = 0.0;
  std::optional<Quartiles> gp_quartiles;  // of sum_7yr_GP
  std::map<std::string, std::size_t> position_counts;

  bool defined() const { return n > 0; }
};

std::vector<GroupProfile> profile_groups(const ModelTree& tree, const Dataset& data);

struct Binning {
  double width = 1.0;
  double origin = -0.5;  // bin k covers [origin + k w, origin + (k + 1) w)
  std::size_t min_support = 3;
};

struct ProportionBin {
  double center = 0;
  double proportion = 0;  // of players with sum_7yr_GP > 0
  std::size_t count = 0;
  bool low_support = false;
};

// Bins without players are omitted. Throws ValidationError for a
// non-positive width or an empty selection.
std::vector<ProportionBin> proportion_curve(const Dataset& data, std::size_t feature,
                                            const Binning& binning = {});
std::vector<ProportionBin> proportion_curve(const Dataset& data, std::span<const std::size_t> rows,
                                            std::size_t feature, const Binning& binning = {});

// Pearson correlation between a feature and sum_7yr_GP over the rows. NaN
// when either is constant.
double outcome_correlation(const Dataset& data, std::span<const std::size_t> rows,
                           std::size_t feature);

struct Contribution {
  std::size_t feature = 0;
  std::string name;
  double value = 0.0;
};

// Log-odds contributions w_j (x_ij - mean_gj) on the model's standardized
// scale. One-hot levels are separate features.
struct Attribution {
  std::string id;
  int group_id = 0;
  double total = 0.0;
  std::vector<double> contributions;
  std::vector<Contribution> strongest;  // k largest, descending
  std::vector<Contribution> weakest;    // k smallest, ascending
};

Attribution attribute(const Example& player, const GroupProfile& profile,
                      const LogisticModel& model, const FeatureSchema& schema, std::size_t k = 3);

// Routes the player through the tree and attributes against the matching
// profile. Throws SchemaMismatchError on a schema mismatch and
// ValidationError when the player's group has no defined profile.
Attribution explain(const ModelTree& tree, const std::vector<GroupProfile>& profiles,
                    const Example& player, std::size_t k = 3);

struct TopPlayer {
  std::string id;
  int draft_year = 0;
  double probability = 0.0;
  Attribution attribution;
};

struct GroupTopPlayers {
  int group_id = 0;
  std::vector<TopPlayer> players;  // descending probability
};

// The `per_group` most probable players of each group with their k
// strongest contributions, measured against `profiles`.
std::vector<GroupTopPlayers> top_players(const ModelTree& tree, const Dataset& data,
                                         const std::vector<GroupProfile>& profiles,
                                         std::size_t per_group, std::size_t k = 3);
std::vector<GroupTopPlayers> top_players(const ModelTree& tree, const Dataset& data,
                                         std::size_t per_group, std::size_t k = 3);

// Plot-ready tables.
std::string boxplot_csv(const std::vector<GroupProfile>& profiles);
std::string group_means_csv(const std::vector<GroupProfile>& profiles, const FeatureSchema& schema);
std::string weight_table_csv(const ModelTree& tree);
std::string position_distribution_csv(const std::vector<GroupProfile>& profiles);
// One block per (group, feature); group 0 stands for all rows.
std::string proportion_curves_csv(const ModelTree& tree, const Dataset& data,
                                  const std::vector<std::string>& features,
                                  const Binning& binning = {});

}  // namespace draftlmt
