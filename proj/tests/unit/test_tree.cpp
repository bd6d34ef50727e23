#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "draftlmt/error.hpp"
#include "draftlmt/serialization.hpp"
#include "draftlmt/synthetic.hpp"
#include "draftlmt/tree.hpp"

using namespace draftlmt;

namespace {

Dataset one_feature(const std::vector<double>& x, const std::vector<int>& y) {
  Dataset d;
  d.schema = numeric_schema(1);
  for (std::size_t i = 0; i < x.size(); ++i) {
    Example e;
    e.id = std::to_string(i);
    e.x = {x[i]};
    e.label = y[i];
    d.rows.push_back(e);
  }
  return d;
}

TreeConfig tiny() {
  TreeConfig c;
  c.min_leaf = 1;
  c.min_split = 2;
  c.min_gain = 0;
  return c;
}

double xlogx(double a, double n) { return a > 0 ? a * std::log(a / n) : 0.0; }
double constant_loss(double n, double n1) { return -xlogx(n1, n) - xlogx(n - n1, n); }

// Loss of one side under the linear-likelihood criterion for a single
// feature z already standardized on the parent.
double linear_side_loss(const std::vector<double>& z, const std::vector<int>& y, double ridge) {
  const double n = static_cast<double>(z.size());
  double n1 = 0, sz = 0, szz = 0, sz1 = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    n1 += y[i];
    sz += z[i];
    szz += z[i] * z[i];
    sz1 += y[i] * z[i];
  }
  const double base = constant_loss(n, n1);
  if (n1 == 0 || n1 == n) return base;
  const double p = n1 / n;
  const double g = sz1 - p * sz;
  const double info = p * (1 - p) * (szz - sz * sz / n) + ridge;
  return base - std::min(0.5 * g * g / info, base);
}

}  // namespace

TEST(SelectSplit, IdenticalRowsHaveNoSplit) {
  const auto d = one_feature({3, 3, 3, 3, 3, 3}, {0, 1, 0, 1, 1, 0});
  EXPECT_FALSE(select_split(d, tiny()).has_value());
}

TEST(SelectSplit, MidpointOfFourPointsUnderBothCriteria) {
  const std::vector<double> x = {1, 2, 3, 4};
  const std::vector<int> y = {0, 0, 1, 1};
  const auto d = one_feature(x, y);

  // Exhaustive evaluation of the three cuts.
  double mean = 2.5, sd = std::sqrt(1.25);
  std::vector<double> z;
  for (double v : x) z.push_back((v - mean) / sd);
  for (const auto criterion : {SplitCriterion::kLinearLikelihood, SplitCriterion::kEntropy}) {
    TreeConfig c = tiny();
    c.criterion = criterion;
    double best_gain = -1, best_cut = 0;
    for (std::size_t k = 1; k < 4; ++k) {
      std::vector<double> zl(z.begin(), z.begin() + k), zr(z.begin() + k, z.end());
      std::vector<int> yl(y.begin(), y.begin() + k), yr(y.begin() + k, y.end());
      double gain;
      if (criterion == SplitCriterion::kEntropy) {
        gain = constant_loss(4, 2) - constant_loss(k, std::accumulate(yl.begin(), yl.end(), 0.0)) -
               constant_loss(4 - k, std::accumulate(yr.begin(), yr.end(), 0.0));
      } else {
        gain = linear_side_loss(z, y, c.split_ridge) - linear_side_loss(zl, yl, c.split_ridge) -
               linear_side_loss(zr, yr, c.split_ridge);
      }
      if (gain > best_gain) {
        best_gain = gain;
        best_cut = (x[k - 1] + x[k]) / 2;
      }
    }
    const auto s = select_split(d, c);
    ASSERT_TRUE(s.has_value());
    EXPECT_EQ(s->threshold, best_cut);
    EXPECT_EQ(s->threshold, 2.5);
    EXPECT_NEAR(s->gain, best_gain / constant_loss(4, 2), 1e-12);
  }
}

TEST(SelectSplit, PerfectBinaryPredictorWins) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  Dataset d;
  d.schema = numeric_schema(3);
  for (int i = 0; i < 200; ++i) {
    Example e;
    e.id = std::to_string(i);
    e.label = i % 2;
    e.x = {normal(rng), static_cast<double>(e.label), normal(rng)};
    d.rows.push_back(e);
  }
  for (const auto criterion : {SplitCriterion::kLinearLikelihood, SplitCriterion::kEntropy}) {
    TreeConfig c;
    c.criterion = criterion;
    const auto s = select_split(d, c);
    ASSERT_TRUE(s.has_value());
    EXPECT_EQ(s->feature, 1u);
    EXPECT_EQ(s->threshold, 0.5);
  }
}

TEST(SelectSplit, OneHotColumnsGiveCategorySplits) {
  Dataset d;
  d.schema = FeatureSchema({{"Country=CAN", FeatureKind::kOneHot, "Country", "CAN"},
                            {"Country=EURO", FeatureKind::kOneHot, "Country", "EURO"}});
  for (int i = 0; i < 100; ++i) {
    Example e;
    e.id = std::to_string(i);
    const bool can = i < 50;
    e.x = {can ? 1.0 : 0.0, can ? 0.0 : 1.0};
    e.label = can ? (i % 10 != 0) : (i % 10 == 0);
    d.rows.push_back(e);
  }
  const auto s = select_split(d, TreeConfig{});
  ASSERT_TRUE(s.has_value());
  EXPECT_EQ(s->kind, SplitKind::kCategory);
  EXPECT_EQ(s->feature, 0u);  // tie with the complementary column goes to the lower index
  EXPECT_EQ(s->level, "CAN");
  EXPECT_FALSE(s->goes_left(std::vector<double>{1.0, 0.0}));
}

TEST(SelectSplit, RespectsMinLeaf) {
  const auto d = one_feature({1, 2, 3, 4, 5, 6}, {1, 0, 0, 0, 0, 0});
  TreeConfig c = tiny();
  c.min_leaf = 2;
  const auto s = select_split(d, c);
  if (s) EXPECT_GE(s->threshold, 2.5);
}

TEST(Grow, DepthZeroIsPlainLogisticRegression) {
  const Dataset d = linear_logistic_data(400, {1.0, -1.0}, 0.0, 3);
  TreeConfig c;
  c.max_depth = 0;
  const ModelTree tree = train(d, c);
  ASSERT_EQ(tree.leaf_count(), 1u);
  const auto mle = fit_mle(design_matrix(d), label_vector(d));
  EXPECT_EQ(tree.node(0).model, mle);
  for (const auto& row : d.rows) EXPECT_EQ(tree.predict(row.x), mle.predict_proba(row.x));
}

TEST(Grow, TwoRegimeLeavesMatchTruePartitionFits) {
  const Dataset d = two_regime_data(4000, 7);
  const ModelTree tree = train(d, TreeConfig{});
  ASSERT_EQ(tree.leaf_count(), 2u);
  std::vector<std::size_t> a, b;
  for (std::size_t i = 0; i < d.size(); ++i) (d.rows[i].x[0] < 5 ? a : b).push_back(i);
  const auto fit_a = fit_mle(design_matrix(d, a), label_vector(d, a));
  const auto fit_b = fit_mle(design_matrix(d, b), label_vector(d, b));
  const auto& left = tree.leaf_for_group(1).model;
  const auto& right = tree.leaf_for_group(2).model;
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_NEAR(left.raw_weights()[j], fit_a.raw_weights()[j], 0.15) << j;
    EXPECT_NEAR(right.raw_weights()[j], fit_b.raw_weights()[j], 0.15) << j;
  }
  EXPECT_GT(left.weights()[1], 0);
  EXPECT_LT(right.weights()[1], 0);
}

TEST(ModelTree, BoundaryRoutesRightAndGroupsNumberLeftToRight) {
  const auto schema = numeric_schema(2);
  std::vector<TreeNode> nodes(5);
  nodes[0].split = Split{0, SplitKind::kNumeric, 5.0, "", 0};
  nodes[0].left = 1;
  nodes[0].right = 2;
  nodes[2].split = Split{1, SplitKind::kNumeric, 0.0, "", 0};
  nodes[2].left = 3;
  nodes[2].right = 4;
  for (int i : {1, 3, 4}) nodes[i].model = LogisticModel::constant(i, 2);
  nodes[0].model = nodes[2].model = LogisticModel::constant(0, 2);
  const ModelTree tree(schema, nodes);
  EXPECT_EQ(tree.leaf_count(), 3u);
  EXPECT_EQ(tree.depth(), 2);
  EXPECT_EQ(tree.assign_group(std::vector<double>{4.999, 9}), 1);
  EXPECT_EQ(tree.assign_group(std::vector<double>{5.0, -1}), 2);
  EXPECT_EQ(tree.assign_group(std::vector<double>{5.0, 0.0}), 3);
  EXPECT_THROW(tree.assign_group(std::vector<double>{1.0}), SchemaMismatchError);
}

TEST(ModelTree, PredictComposesRoutingAndLeafModel) {
  const Dataset d = two_regime_data(2000, 19);
  const ModelTree tree = train(d, TreeConfig{});
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3, 13);
  for (int t = 0; t < 1000; ++t) {
    const std::vector<double> x{u(rng), u(rng) / 3, u(rng) / 3};
    const auto& leaf = tree.leaf_for_group(tree.assign_group(x));
    EXPECT_EQ(tree.predict(x), leaf.model.predict_proba(x));
  }
}

TEST(ModelTree, PartitionCoversEveryRowOnce) {
  const Dataset d = two_regime_data(1500, 23);
  const ModelTree tree = grow(d, TreeConfig{});
  const auto groups = tree.partition(d);
  std::vector<int> seen(d.size(), 0);
  std::size_t total = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (const auto i : groups[g]) {
      ++seen[i];
      EXPECT_EQ(tree.assign_group(d.rows[i].x), static_cast<int>(g + 1));
    }
    total += groups[g].size();
    EXPECT_EQ(tree.leaf_for_group(static_cast<int>(g + 1)).n, groups[g].size());
  }
  EXPECT_EQ(total, d.size());
  for (int s : seen) EXPECT_EQ(s, 1);
}

TEST(ModelTree, SchemaMismatch) {
  const ModelTree tree = train(two_regime_data(300, 2), TreeConfig{});
  Dataset other = two_regime_data(10, 3, 2);
  EXPECT_THROW(tree.check_schema(other.schema), SchemaMismatchError);
  EXPECT_THROW(tree.partition(other), SchemaMismatchError);
}

TEST(Prune, SingleLeafUnchanged) {
  const Dataset d = noise_data(200, 2, 1);
  TreeConfig c;
  c.max_depth = 0;
  const ModelTree tree = grow(d, c);
  const ModelTree pruned = prune(tree, d, 5);
  EXPECT_EQ(pruned.leaf_count(), 1u);
  EXPECT_EQ(pruned.node(0).model, tree.node(0).model);
}

TEST(Prune, NeverAddsLeavesAndRejectsFewFolds) {
  const Dataset d = two_regime_data(1500, 29);
  const ModelTree grown = grow(d, TreeConfig{});
  const auto result = prune_with_report(grown, d, 5);
  EXPECT_LE(result.tree.leaf_count(), grown.leaf_count());
  EXPECT_EQ(result.report.leaf_counts.front() >= result.report.leaf_counts.back(), true);
  EXPECT_LE(result.report.best, result.report.chosen);
  EXPECT_THROW(prune(grown, d, 1), ValidationError);
}

TEST(Prune, PureNoiseCollapses) {
  int single = 0;
  for (int s = 0; s < 5; ++s) single += train(noise_data(1000, 3, 900 + s), TreeConfig{}).leaf_count() == 1;
  EXPECT_GE(single, 4);
}

TEST(RefitLeaves, RoutingUnchanged) {
  const Dataset d = two_regime_data(1200, 31);
  const ModelTree grown = grow(d, TreeConfig{});
  const ModelTree refit = refit_leaves(grown, d);
  for (const auto& row : d.rows) EXPECT_EQ(grown.assign_group(row.x), refit.assign_group(row.x));
}

TEST(Train, DeterministicAndSerializable) {
  const Dataset d = two_regime_data(1500, 37);
  TreeConfig c;
  c.seed = 5;
  const ModelTree a = train(d, c), b = train(d, c);
  const std::string ja = to_json(a).dump(), jb = to_json(b).dump();
  EXPECT_EQ(ja, jb);
  const ModelTree loaded = model_tree_from_json(Json::parse(ja));
  EXPECT_EQ(to_json(loaded).dump(), ja);
  for (const auto& row : d.rows) EXPECT_EQ(loaded.predict(row.x), a.predict(row.x));
}

TEST(Train, RowOrderDoesNotChangeStructure) {
  Dataset d = two_regime_data(2000, 41);
  const ModelTree a = train(d, TreeConfig{});
  std::reverse(d.rows.begin(), d.rows.end());
  const ModelTree b = train(d, TreeConfig{});
  ASSERT_TRUE(a.node(0).split && b.node(0).split);
  EXPECT_EQ(a.node(0).split->feature, b.node(0).split->feature);
  EXPECT_EQ(a.node(0).split->threshold, b.node(0).split->threshold);
}

TEST(SplitCriterionNames, RoundTrip) {
  for (const auto c : {SplitCriterion::kEntropy, SplitCriterion::kLinearLikelihood}) {
    EXPECT_EQ(parse_split_criterion(to_string(c)), c);
  }
  EXPECT_THROW(parse_split_criterion("gini"), ValidationError);
}
