#include "draftlmt/tree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Cholesky>

#include "draftlmt/error.hpp"

namespace draftlmt {
namespace {

// Negative log-likelihood (nats) of a constant-probability model fitted to
// n rows of which n1 are positive.
double constant_nll(double n, double n1) {
  const double n0 = n - n1;
  double out = 0.0;
  if (n1 > 0) out -= n1 * std::log(n1 / n);
  if (n0 > 0) out -= n0 * std::log(n0 / n);
  return out;
}

// Running sufficient statistics of one side of a candidate split, on the
// node-standardized active columns.
struct SideStats {
  double n = 0;
  double n1 = 0;
  Eigen::VectorXd sum;      // sum of z
  Eigen::VectorXd sum_pos;  // sum of z over positive rows
  Eigen::MatrixXd cross;    // sum of z z^T

  explicit SideStats(Eigen::Index a, bool with_cross)
      : sum(Eigen::VectorXd::Zero(a)),
        sum_pos(Eigen::VectorXd::Zero(a)),
        cross(with_cross ? Eigen::MatrixXd::Zero(a, a) : Eigen::MatrixXd()) {}

  void add(const Eigen::Ref<const Eigen::VectorXd>& z, double y) {
    n += 1;
    sum += z;
    if (y > 0.5) {
      n1 += 1;
      sum_pos += z;
    }
    if (cross.size() > 0) cross.selfadjointView<Eigen::Lower>().rankUpdate(z);
  }

  SideStats minus(const SideStats& other) const {
    SideStats out = *this;
    out.n -= other.n;
    out.n1 -= other.n1;
    out.sum -= other.sum;
    out.sum_pos -= other.sum_pos;
    if (cross.size() > 0) out.cross -= other.cross;
    return out;
  }
};

// Second-order log-likelihood improvement from adding linear terms to the
// side's constant model: 0.5 g^T (S + ridge I)^-1 g with g the score and S
// the Fisher information at the side's base rate (intercept profiled out).
// Capped by the side's constant-model log-loss, which no model can undercut.
double slope_gain(const SideStats& s, double ridge) {
  if (s.n1 <= 0 || s.n1 >= s.n || s.sum.size() == 0) return 0.0;
  const double p = s.n1 / s.n;
  const Eigen::VectorXd g = s.sum_pos - p * s.sum;
  Eigen::MatrixXd info = s.cross.selfadjointView<Eigen::Lower>();
  info.noalias() -= (s.sum * s.sum.transpose()) / s.n;
  info *= p * (1.0 - p);
  info.diagonal().array() += ridge;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
  double q = 0.5 * g.dot(ldlt.solve(g));
  if (!std::isfinite(q) || q < 0) q = 0.0;
  return std::min(q, constant_nll(s.n, s.n1));
}

// Objective to be maximized: parent loss minus summed child losses, where a
// side's loss is its constant-model log-loss less its slope gain.
double side_loss(const SideStats& s, const TreeConfig& config) {
  const double base = constant_nll(s.n, s.n1);
  if (config.criterion == SplitCriterion::kEntropy) return base;
  return base - slope_gain(s, config.split_ridge);
}

BoostOptions boost_options(const TreeConfig& config) {
  BoostOptions options;
  options.stages = config.boost_stages;
  return options;
}

FitOptions fit_options(const TreeConfig& config) {
  FitOptions options;
  options.ridge = config.ridge;
  return options;
}

class Grower {
 public:
  Grower(const Dataset& data, const TreeConfig& config) : data_(data), config_(config) {}

  std::vector<TreeNode> run() {
    std::vector<std::size_t> all(data_.size());
    std::iota(all.begin(), all.end(), 0);
    leaves_ = 1;
    build(all, 0, nullptr);
    return std::move(nodes_);
  }

 private:
  std::size_t build(const std::vector<std::size_t>& rows, int depth,
                    const AdditiveStageModel* parent) {
    const Eigen::MatrixXd X = design_matrix(data_, rows);
    const Eigen::VectorXd y = label_vector(data_, rows);
    AdditiveStageModel model = parent ? logitboost_continue(*parent, X, y, boost_options(config_))
                                      : logitboost_fit(X, y, boost_options(config_));

    const std::size_t index = nodes_.size();
    nodes_.emplace_back();
    nodes_[index].n = rows.size();
    nodes_[index].prop_played = y.size() ? y.mean() : 0.0;
    nodes_[index].model = LogisticModel::constant(0.0, data_.schema.width());

    std::optional<Split> split;
    if (depth < config_.max_depth && rows.size() >= config_.min_split &&
        leaves_ < config_.max_leaves) {
      split = select_split(data_, rows, config_);
    }
    if (split) {
      std::vector<std::size_t> left, right;
      for (const auto r : rows) {
        (split->goes_left(data_.rows[r].x) ? left : right).push_back(r);
      }
      ++leaves_;
      nodes_[index].split = split;
      const std::size_t l = build(left, depth + 1, &model);
      const std::size_t r = build(right, depth + 1, &model);
      nodes_[index].left = l;
      nodes_[index].right = r;
    }
    nodes_[index].growth_model = std::move(model);
    return index;
  }

  const Dataset& data_;
  const TreeConfig& config_;
  std::vector<TreeNode> nodes_;
  std::size_t leaves_ = 1;
};

ModelTree grow_structure(const Dataset& data, const TreeConfig& config) {
  if (data.empty()) throw ValidationError("cannot grow a tree on an empty dataset");
  return ModelTree(data.schema, Grower(data, config).run(), config, data.years());
}

// Node indices visited by each row, root first.
std::vector<std::size_t> path_of(const ModelTree& tree, std::span<const double> x) {
  std::vector<std::size_t> path{0};
  while (!tree.node(path.back()).is_leaf()) {
    const auto& n = tree.node(path.back());
    path.push_back(n.split->goes_left(x) ? n.left : n.right);
  }
  return path;
}

double growth_log_odds(const TreeNode& node, std::span<const double> x) {
  if (!node.growth_model) throw Error("tree node has no growth-time model");
  return node.growth_model->log_odds(x);
}

// Weakest-link pruning sequence over a tree whose nodes carry growth models.
class CostComplexity {
 public:
  struct Step {
    double alpha;
    std::vector<char> collapsed;
    std::size_t leaves;
  };

  CostComplexity(const ModelTree& tree, const Dataset& data)
      : tree_(tree), risk_(tree.nodes().size(), 0.0) {
    for (const auto& row : data.rows) {
      for (const auto i : path_of(tree, row.x)) {
        risk_[i] += log_loss(growth_log_odds(tree.node(i), row.x), row.label);
      }
    }
    build_sequence();
  }

  const std::vector<Step>& steps() const { return steps_; }

  const Step& at(double alpha) const {
    const Step* chosen = &steps_.front();
    for (const auto& s : steps_) {
      if (s.alpha <= alpha) chosen = &s;
    }
    return *chosen;
  }

  // Deepest non-collapsed node reached by x.
  std::size_t route(std::span<const double> x, const std::vector<char>& collapsed) const {
    std::size_t i = 0;
    while (!tree_.node(i).is_leaf() && !collapsed[i]) {
      const auto& n = tree_.node(i);
      i = n.split->goes_left(x) ? n.left : n.right;
    }
    return i;
  }

 private:
  struct Subtree {
    double risk;
    std::size_t leaves;
  };

  Subtree evaluate(std::size_t i, const std::vector<char>& collapsed,
                   const std::function<void(std::size_t, double)>& visit) const {
    const auto& n = tree_.node(i);
    if (n.is_leaf() || collapsed[i]) return {risk_[i], 1};
    const auto l = evaluate(n.left, collapsed, visit);
    const auto r = evaluate(n.right, collapsed, visit);
    const Subtree sub{l.risk + r.risk, l.leaves + r.leaves};
    visit(i, (risk_[i] - sub.risk) / static_cast<double>(sub.leaves - 1));
    return sub;
  }

  void collapse_non_improving(std::size_t i, std::vector<char>& collapsed) const {
    const auto& n = tree_.node(i);
    if (n.is_leaf()) return;
    collapse_non_improving(n.left, collapsed);
    collapse_non_improving(n.right, collapsed);
    const auto sub = evaluate(i, collapsed, [](std::size_t, double) {});
    if (risk_[i] <= sub.risk + 1e-12 * (1.0 + std::abs(sub.risk))) collapsed[i] = 1;
  }

  std::size_t leaf_count(const std::vector<char>& collapsed) const {
    return evaluate(0, collapsed, [](std::size_t, double) {}).leaves;
  }

  void build_sequence() {
    std::vector<char> collapsed(tree_.nodes().size(), 0);
    collapse_non_improving(0, collapsed);
    steps_.push_back({0.0, collapsed, leaf_count(collapsed)});
    while (!tree_.node(0).is_leaf() && !collapsed[0]) {
      std::vector<std::pair<std::size_t, double>> links;
      evaluate(0, collapsed, [&](std::size_t i, double g) { links.emplace_back(i, g); });
      double alpha = std::numeric_limits<double>::infinity();
      for (const auto& [i, g] : links) alpha = std::min(alpha, g);
      alpha = std::max(alpha, 0.0);
      const double cut = alpha + 1e-12 * (1.0 + alpha);
      for (const auto& [i, g] : links) {
        if (g <= cut) collapsed[i] = 1;
      }
      steps_.push_back({alpha, collapsed, leaf_count(collapsed)});
    }
  }

  const ModelTree& tree_;
  std::vector<double> risk_;
  std::vector<Step> steps_;
};

// Copies the tree, turning collapsed internal nodes into leaves.
ModelTree collapse(const ModelTree& tree, const std::vector<char>& collapsed) {
  std::vector<TreeNode> out;
  std::function<std::size_t(std::size_t)> copy = [&](std::size_t i) -> std::size_t {
    const std::size_t index = out.size();
    out.push_back(tree.node(i));
    if (out[index].is_leaf() || collapsed[i]) {
      if (!out[index].is_leaf()) out[index].model = LogisticModel::constant(0.0, tree.schema().width());
      out[index].split.reset();
      out[index].left = out[index].right = 0;
      return index;
    }
    const std::size_t l = copy(tree.node(i).left);
    const std::size_t r = copy(tree.node(i).right);
    out[index].left = l;
    out[index].right = r;
    return index;
  };
  copy(0);
  return ModelTree(tree.schema(), std::move(out), tree.config(), tree.training_years());
}

// Fisher-Yates driven directly by the engine so fold assignment does not
// depend on the standard library's distribution implementations.
void shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

std::vector<int> stratified_folds(const Dataset& data, int folds, std::uint64_t seed) {
  std::vector<std::size_t> neg, pos;
  for (std::size_t i = 0; i < data.size(); ++i) (data.rows[i].label ? pos : neg).push_back(i);
  std::mt19937_64 rng(seed);
  shuffle(neg, rng);
  shuffle(pos, rng);
  std::vector<int> fold(data.size(), 0);
  std::size_t k = 0;
  for (const auto i : neg) fold[i] = static_cast<int>(k++ % static_cast<std::size_t>(folds));
  for (const auto i : pos) fold[i] = static_cast<int>(k++ % static_cast<std::size_t>(folds));
  return fold;
}

}  // namespace

std::string to_string(SplitCriterion criterion) {
  return criterion == SplitCriterion::kEntropy ? "entropy" : "linear-likelihood";
}

SplitCriterion parse_split_criterion(std::string_view text) {
  if (text == "entropy") return SplitCriterion::kEntropy;
  if (text == "linear-likelihood") return SplitCriterion::kLinearLikelihood;
  throw ValidationError("unknown split criterion '" + std::string(text) +
                        "' (expected linear-likelihood or entropy)");
}

ModelTree::ModelTree(FeatureSchema schema, std::vector<TreeNode> nodes, TreeConfig config,
                     std::set<int> training_years)
    : schema_(std::move(schema)),
      nodes_(std::move(nodes)),
      config_(config),
      training_years_(std::move(training_years)) {
  if (nodes_.empty()) throw Error("model tree has no nodes");
  std::vector<int> parents(nodes_.size(), 0);
  for (const auto& n : nodes_) {
    if (n.is_leaf()) {
      if (n.model.width() != schema_.width()) {
        throw SchemaMismatchError("leaf model width " + std::to_string(n.model.width()) +
                                  " differs from schema width " + std::to_string(schema_.width()));
      }
      continue;
    }
    if (n.split->feature >= schema_.width()) throw Error("split refers to an unknown feature");
    if (n.left >= nodes_.size() || n.right >= nodes_.size() || n.left == 0 || n.right == 0) {
      throw Error("split refers to an invalid child node");
    }
    ++parents[n.left];
    ++parents[n.right];
  }
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (parents[i] != 1) throw Error("model tree nodes do not form a tree");
  }
  number_groups();
}

void ModelTree::number_groups() {
  int next = 1;
  for (const auto i : leaves()) nodes_[i].group_id = next++;
}

std::vector<std::size_t> ModelTree::leaves() const {
  std::vector<std::size_t> out;
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    const auto i = stack.back();
    stack.pop_back();
    const auto& n = nodes_[i];
    if (n.is_leaf()) {
      out.push_back(i);
    } else {
      stack.push_back(n.right);
      stack.push_back(n.left);
    }
  }
  return out;
}

std::size_t ModelTree::leaf_count() const { return leaves().size(); }

int ModelTree::depth() const {
  std::function<int(std::size_t)> d = [&](std::size_t i) {
    const auto& n = nodes_[i];
    return n.is_leaf() ? 0 : 1 + std::max(d(n.left), d(n.right));
  };
  return d(0);
}

const TreeNode& ModelTree::leaf_for_group(int group_id) const {
  const auto ls = leaves();
  if (group_id < 1 || static_cast<std::size_t>(group_id) > ls.size()) {
    throw ValidationError("no group " + std::to_string(group_id));
  }
  return nodes_[ls[static_cast<std::size_t>(group_id - 1)]];
}

void ModelTree::check_width(std::size_t n) const {
  if (n != schema_.width()) {
    throw SchemaMismatchError("feature vector has " + std::to_string(n) +
                              " entries, tree schema has " + std::to_string(schema_.width()));
  }
}

void ModelTree::check_schema(const FeatureSchema& schema) const {
  if (schema.hash() != schema_.hash()) {
    throw SchemaMismatchError("dataset schema " + schema.hash().substr(0, 12) +
                              " does not match model schema " + schema_.hash().substr(0, 12));
  }
}

std::size_t ModelTree::leaf_index(std::span<const double> x) const {
  check_width(x.size());
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const auto& n = nodes_[i];
    i = n.split->goes_left(x) ? n.left : n.right;
  }
  return i;
}

int ModelTree::assign_group(std::span<const double> x) const {
  return nodes_[leaf_index(x)].group_id;
}

double ModelTree::predict(std::span<const double> x) const {
  return nodes_[leaf_index(x)].model.predict_proba(x);
}

double ModelTree::log_odds(std::span<const double> x) const {
  return nodes_[leaf_index(x)].model.log_odds(x);
}

std::vector<std::vector<std::size_t>> ModelTree::partition(const Dataset& data) const {
  check_schema(data.schema);
  std::vector<std::vector<std::size_t>> groups(leaf_count());
  for (std::size_t i = 0; i < data.size(); ++i) {
    groups[static_cast<std::size_t>(assign_group(data.rows[i].x) - 1)].push_back(i);
  }
  return groups;
}

std::optional<Split> select_split(const Dataset& data, std::span<const std::size_t> rows,
                                  const TreeConfig& config) {
  const std::size_t n = rows.size();
  const std::size_t min_leaf = std::max<std::size_t>(config.min_leaf, 1);
  if (n < 2 * min_leaf || n < 2) return std::nullopt;

  double n1 = 0;
  for (const auto r : rows) n1 += data.rows[r].label;
  const double parent_base = constant_nll(static_cast<double>(n), n1);
  if (parent_base <= 0) return std::nullopt;

  // Node-standardized active columns.
  const std::size_t d = data.schema.width();
  std::vector<std::size_t> active;
  std::vector<double> mean(d, 0.0), scale(d, 1.0);
  for (std::size_t j = 0; j < d; ++j) {
    double m = 0;
    for (const auto r : rows) m += data.rows[r].x[j];
    m /= static_cast<double>(n);
    double v = 0;
    for (const auto r : rows) v += (data.rows[r].x[j] - m) * (data.rows[r].x[j] - m);
    const double sd = std::sqrt(v / static_cast<double>(n));
    mean[j] = m;
    if (sd > 1e-12 * (1.0 + std::abs(m))) {
      scale[j] = sd;
      active.push_back(j);
    }
  }
  if (active.empty()) return std::nullopt;

  const bool linear = config.criterion == SplitCriterion::kLinearLikelihood;
  const auto a = static_cast<Eigen::Index>(linear ? active.size() : 0);
  Eigen::MatrixXd Z(a, static_cast<Eigen::Index>(n));  // column per row
  for (std::size_t c = 0; c < n && linear; ++c) {
    for (Eigen::Index k = 0; k < a; ++k) {
      const auto j = active[static_cast<std::size_t>(k)];
      Z(k, static_cast<Eigen::Index>(c)) = (data.rows[rows[c]].x[j] - mean[j]) / scale[j];
    }
  }

  SideStats total(a, linear);
  for (std::size_t c = 0; c < n; ++c) {
    total.add(Z.col(static_cast<Eigen::Index>(c)), data.rows[rows[c]].label);
  }
  const double parent_loss = side_loss(total, config);

  std::optional<Split> best;
  std::vector<std::size_t> order(n);
  for (const auto j : active) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) {
      return data.rows[rows[p]].x[j] < data.rows[rows[q]].x[j];
    });
    SideStats left(a, linear);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const std::size_t c = order[k];
      left.add(Z.col(static_cast<Eigen::Index>(c)), data.rows[rows[c]].label);
      const double lo = data.rows[rows[c]].x[j];
      const double hi = data.rows[rows[order[k + 1]]].x[j];
      if (lo == hi) continue;
      const std::size_t nl = k + 1;
      if (nl < min_leaf || n - nl < min_leaf) continue;
      const double threshold = lo + (hi - lo) / 2.0;
      if (!(lo < threshold && threshold < hi)) continue;

      const SideStats right = total.minus(left);
      const double gain = parent_loss - side_loss(left, config) - side_loss(right, config);
      const double relative = gain / parent_base;
      if (relative < config.min_gain) continue;
      if (best && !(relative > best->gain)) continue;

      Split s;
      s.feature = j;
      s.threshold = threshold;
      s.gain = relative;
      if (data.schema[j].kind == FeatureKind::kOneHot) {
        s.kind = SplitKind::kCategory;
        s.level = data.schema[j].level;
      }
      best = s;
    }
  }
  return best;
}

std::optional<Split> select_split(const Dataset& data, const TreeConfig& config) {
  std::vector<std::size_t> all(data.size());
  std::iota(all.begin(), all.end(), 0);
  return select_split(data, all, config);
}

ModelTree refit_leaves(const ModelTree& tree, const Dataset& data) {
  tree.check_schema(data.schema);
  std::vector<TreeNode> nodes = tree.nodes();
  const auto groups = tree.partition(data);
  const auto leaves = tree.leaves();
  for (std::size_t g = 0; g < leaves.size(); ++g) {
    TreeNode& leaf = nodes[leaves[g]];
    const auto& rows = groups[g];
    leaf.n = rows.size();
    if (rows.empty()) {
      leaf.prop_played = 0.0;
      leaf.model = LogisticModel::constant(0.0, data.schema.width());
      continue;
    }
    const Eigen::VectorXd y = label_vector(data, rows);
    leaf.prop_played = y.mean();
    leaf.model = fit_mle(design_matrix(data, rows), y, fit_options(tree.config()));
  }
  return ModelTree(tree.schema(), std::move(nodes), tree.config(), tree.training_years());
}

ModelTree fit_growth_models(const ModelTree& tree, const Dataset& data) {
  tree.check_schema(data.schema);
  std::vector<TreeNode> nodes = tree.nodes();
  const auto options = boost_options(tree.config());
  std::function<void(std::size_t, const std::vector<std::size_t>&, const AdditiveStageModel*)>
      fit = [&](std::size_t i, const std::vector<std::size_t>& rows,
                const AdditiveStageModel* parent) {
        const Eigen::MatrixXd X = design_matrix(data, rows);
        const Eigen::VectorXd y = label_vector(data, rows);
        if (parent) {
          nodes[i].growth_model = logitboost_continue(*parent, X, y, options);
        } else if (rows.empty()) {
          nodes[i].growth_model = AdditiveStageModel(0.0);
        } else {
          nodes[i].growth_model = logitboost_fit(X, y, options);
        }
        if (nodes[i].is_leaf()) return;
        std::vector<std::size_t> left, right;
        for (const auto r : rows) (nodes[i].split->goes_left(data.rows[r].x) ? left : right).push_back(r);
        const AdditiveStageModel model = *nodes[i].growth_model;
        fit(nodes[i].left, left, &model);
        fit(nodes[i].right, right, &model);
      };
  std::vector<std::size_t> all(data.size());
  std::iota(all.begin(), all.end(), 0);
  fit(0, all, nullptr);
  return ModelTree(tree.schema(), std::move(nodes), tree.config(), tree.training_years());
}

ModelTree grow(const Dataset& data, const TreeConfig& config) {
  return refit_leaves(grow_structure(data, config), data);
}

PruneResult prune_with_report(const ModelTree& tree, const Dataset& data, int folds) {
  if (folds < 2) throw ValidationError("pruning needs at least 2 folds");
  if (data.empty()) throw ValidationError("cannot prune on an empty dataset");
  PruneResult result;
  if (tree.leaf_count() == 1) {
    result.tree = refit_leaves(tree, data);
    result.report.alphas = {0.0};
    result.report.leaf_counts = {1};
    result.report.cv_loss = {mean_log_loss(result.tree, data)};
    result.report.cv_se = {0.0};
    return result;
  }

  const ModelTree full = fit_growth_models(tree, data);
  const CostComplexity main(full, data);
  const auto& steps = main.steps();
  const std::size_t m = steps.size();

  std::vector<double> betas(m);
  for (std::size_t k = 0; k < m; ++k) {
    betas[k] = k + 1 < m ? std::sqrt(steps[k].alpha * steps[k + 1].alpha)
                         : std::numeric_limits<double>::infinity();
  }

  const auto fold = stratified_folds(data, folds, tree.config().seed);
  std::vector<std::vector<double>> losses(m, std::vector<double>(data.size(), 0.0));
  for (int f = 0; f < folds; ++f) {
    std::vector<std::size_t> train_rows, held_rows;
    for (std::size_t i = 0; i < data.size(); ++i) (fold[i] == f ? held_rows : train_rows).push_back(i);
    if (held_rows.empty() || train_rows.empty()) continue;
    const ModelTree fold_tree = grow_structure(data.subset(train_rows), tree.config());
    const CostComplexity fold_cc(fold_tree, data.subset(train_rows));
    for (std::size_t k = 0; k < m; ++k) {
      const auto& collapsed = fold_cc.at(betas[k]).collapsed;
      for (const auto i : held_rows) {
        const auto& x = data.rows[i].x;
        const auto node = fold_cc.route(x, collapsed);
        losses[k][i] = log_loss(growth_log_odds(fold_tree.node(node), x), data.rows[i].label);
      }
    }
  }

  auto& report = result.report;
  const double n = static_cast<double>(data.size());
  for (std::size_t k = 0; k < m; ++k) {
    const double mean = std::accumulate(losses[k].begin(), losses[k].end(), 0.0) / n;
    double var = 0.0;
    for (const double l : losses[k]) var += (l - mean) * (l - mean);
    var /= std::max(n - 1.0, 1.0);
    report.alphas.push_back(steps[k].alpha);
    report.leaf_counts.push_back(steps[k].leaves);
    report.cv_loss.push_back(mean);
    report.cv_se.push_back(std::sqrt(var / n));
  }
  report.best = static_cast<std::size_t>(
      std::min_element(report.cv_loss.begin(), report.cv_loss.end()) - report.cv_loss.begin());
  const double bound = report.cv_loss[report.best] + report.cv_se[report.best];
  report.chosen = report.best;
  for (std::size_t k = report.best; k < m; ++k) {
    if (report.cv_loss[k] <= bound) report.chosen = k;
  }

  result.tree = refit_leaves(collapse(full, steps[report.chosen].collapsed), data);
  return result;
}

ModelTree prune(const ModelTree& tree, const Dataset& data, int folds) {
  return prune_with_report(tree, data, folds).tree;
}

ModelTree train(const Dataset& data, const TreeConfig& config) {
  ModelTree tree = grow(data, config);
  if (config.prune_folds >= 2) tree = prune(tree, data, config.prune_folds);
  tree.set_training_years(data.years());
  return tree;
}

double mean_log_loss(const ModelTree& tree, const Dataset& data) {
  tree.check_schema(data.schema);
  if (data.empty()) return 0.0;
  double s = 0.0;
  for (const auto& row : data.rows) s += log_loss(tree.log_odds(row.x), row.label);
  return s / static_cast<double>(data.size());
}

}  // namespace draftlmt
