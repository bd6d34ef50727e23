#include "draftlmt/serialization.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <set>

#include "draftlmt/error.hpp"

namespace draftlmt {
namespace {

std::string kind_name(FeatureKind kind) { return kind == FeatureKind::kNumeric ? "numeric" : "one-hot"; }

FeatureKind parse_kind(const std::string& s) {
  if (s == "numeric") return FeatureKind::kNumeric;
  if (s == "one-hot") return FeatureKind::kOneHot;
  throw SchemaError("unknown feature kind '" + s + "'");
}

Json contributions_json(const std::vector<Contribution>& cs) {
  Json out = Json::array();
  for (const auto& c : cs) out.push_back({{"feature", c.name}, {"contribution", c.value}});
  return out;
}

Json quartiles_json(const Quartiles& q) {
  return {{"min", q.min}, {"q1", q.q1}, {"median", q.median}, {"q3", q.q3}, {"max", q.max}};
}

}  // namespace

Json to_json(const ValidationReport& report) {
  Json j;
  j["rows_read"] = report.rows_read;
  j["goalies_excluded"] = report.goalies_excluded;
  j["imputations"] = Json::array();
  for (const auto& i : report.imputations) {
    j["imputations"].push_back({{"id", i.id}, {"draft_year", i.draft_year}, {"css_rank", i.css_rank}});
  }
  j["poolings"] = Json::array();
  for (const auto& p : report.poolings) {
    j["poolings"].push_back(
        {{"id", p.id}, {"draft_year", p.draft_year}, {"from", p.from}, {"to", p.to}});
  }
  j["merges"] = Json::array();
  for (const auto& m : report.merges) {
    j["merges"].push_back({{"id", m.id}, {"draft_year", m.draft_year}, {"entries", m.entries}});
  }
  j["flags"] = Json::array();
  for (const auto& f : report.flags) {
    j["flags"].push_back({{"id", f.id},
                          {"draft_year", f.draft_year},
                          {"line", f.line},
                          {"kind", f.kind},
                          {"detail", f.detail}});
  }
  return j;
}

Json to_json(const FeatureSchema& schema) {
  Json features = Json::array();
  for (const auto& f : schema.features()) {
    Json e{{"name", f.name}, {"kind", kind_name(f.kind)}, {"source", f.source}};
    if (f.kind == FeatureKind::kOneHot) e["level"] = f.level;
    features.push_back(std::move(e));
  }
  return {{"hash", schema.hash()}, {"features", std::move(features)}, {"label", "sum_7yr_GP > 0"}};
}

FeatureSchema schema_from_json(const Json& j) {
  std::vector<FeatureDescriptor> features;
  for (const auto& e : j.at("features")) {
    FeatureDescriptor f;
    f.name = e.at("name").get<std::string>();
    f.kind = parse_kind(e.value("kind", std::string("numeric")));
    f.source = e.value("source", f.name);
    f.level = e.value("level", std::string());
    features.push_back(std::move(f));
  }
  FeatureSchema schema(std::move(features));
  if (j.contains("hash") && j.at("hash").get<std::string>() != schema.hash()) {
    throw SchemaMismatchError("schema hash does not match its feature list");
  }
  return schema;
}

Json to_json(const Dataset& data) {
  Json rows = Json::array();
  for (const auto& r : data.rows) {
    rows.push_back({{"id", r.id},
                    {"draft_year", r.draft_year},
                    {"x", r.x},
                    {"label", r.label},
                    {"sum_7yr_GP", r.sum_7yr_gp},
                    {"sum_7yr_TOI", r.sum_7yr_toi},
                    {"overall_pick", r.overall_pick},
                    {"country", r.country},
                    {"position", r.position}});
  }
  return {{"schema", to_json(data.schema)}, {"rows", std::move(rows)}};
}

Dataset dataset_from_json(const Json& j) {
  Dataset data;
  data.schema = schema_from_json(j.at("schema"));
  for (const auto& r : j.at("rows")) {
    Example ex;
    ex.id = r.at("id").get<std::string>();
    ex.draft_year = r.at("draft_year").get<int>();
    ex.x = r.at("x").get<std::vector<double>>();
    ex.label = r.at("label").get<int>();
    ex.sum_7yr_gp = r.at("sum_7yr_GP").get<double>();
    ex.sum_7yr_toi = r.at("sum_7yr_TOI").get<double>();
    ex.overall_pick = r.at("overall_pick").get<int>();
    ex.country = r.at("country").get<std::string>();
    ex.position = r.at("position").get<std::string>();
    if (ex.x.size() != data.schema.width()) {
      throw SchemaMismatchError("cached row " + ex.id + " does not match the schema width");
    }
    data.rows.push_back(std::move(ex));
  }
  return data;
}

Json to_json(const LogisticModel& model, const std::string& schema_hash) {
  Json scaling = Json::array();
  for (const auto& s : model.scaling()) scaling.push_back({s.mean, s.scale});
  const auto& d = model.diagnostics();
  return {{"schema_hash", schema_hash},
          {"intercept", model.intercept()},
          {"weights", model.weights()},
          {"standardization", std::move(scaling)},
          {"diagnostics",
           {{"iterations", d.iterations},
            {"gradient_norm", d.gradient_norm},
            {"converged", d.converged},
            {"ridge", d.ridge},
            {"ridge_binding", d.ridge_binding},
            {"separated", d.separated}}}};
}

LogisticModel logistic_model_from_json(const Json& j, const FeatureSchema& schema) {
  const std::size_t width = schema.width();
  if (j.contains("schema_hash") && j.at("schema_hash").get<std::string>() != schema.hash()) {
    throw SchemaMismatchError("leaf model was fitted under a different schema");
  }
  double intercept = 0.0;
  if (j.contains("intercept")) {
    intercept = j.at("intercept").get<double>();
  } else if (j.contains("probability")) {
    const double p = j.at("probability").get<double>();
    if (!(p > 0 && p < 1)) throw Error("leaf probability must lie in (0, 1)");
    intercept = std::log(p / (1 - p));
  }
  std::vector<double> weights(width, 0.0);
  if (j.contains("weights")) {
    const auto& w = j.at("weights");
    if (w.is_array()) {
      weights = w.get<std::vector<double>>();
      if (weights.size() != width) throw SchemaMismatchError("leaf weight count differs from schema");
    } else {
      for (const auto& [name, value] : w.items()) {
        const auto idx = schema.index_of(name);
        if (!idx) throw SchemaMismatchError("leaf weight for unknown feature " + name);
        weights[*idx] = value.get<double>();
      }
    }
  }
  std::vector<ColumnScaling> scaling(width);
  if (j.contains("standardization")) {
    const auto& s = j.at("standardization");
    if (s.size() != width) throw SchemaMismatchError("standardization count differs from schema");
    for (std::size_t i = 0; i < width; ++i) scaling[i] = {s[i].at(0).get<double>(), s[i].at(1).get<double>()};
  }
  FitDiagnostics diag;
  if (j.contains("diagnostics")) {
    const auto& d = j.at("diagnostics");
    diag.iterations = d.value("iterations", 0);
    diag.gradient_norm = d.value("gradient_norm", 0.0);
    diag.converged = d.value("converged", false);
    diag.ridge = d.value("ridge", 0.0);
    diag.ridge_binding = d.value("ridge_binding", false);
    diag.separated = d.value("separated", false);
  }
  return LogisticModel(intercept, std::move(weights), std::move(scaling), diag);
}

Json to_json(const TreeConfig& c) {
  return {{"min_leaf", c.min_leaf},       {"min_split", c.min_split},
          {"min_gain", c.min_gain},       {"max_depth", c.max_depth},
          {"max_leaves", c.max_leaves},   {"boost_stages", c.boost_stages},
          {"prune_folds", c.prune_folds}, {"ridge", c.ridge},
          {"split_ridge", c.split_ridge}, {"seed", c.seed},
          {"split_criterion", to_string(c.criterion)}};
}

TreeConfig tree_config_from_json(const Json& j) {
  TreeConfig c;
  c.min_leaf = j.value("min_leaf", c.min_leaf);
  c.min_split = j.value("min_split", c.min_split);
  c.min_gain = j.value("min_gain", c.min_gain);
  c.max_depth = j.value("max_depth", c.max_depth);
  c.max_leaves = j.value("max_leaves", c.max_leaves);
  c.boost_stages = j.value("boost_stages", c.boost_stages);
  c.prune_folds = j.value("prune_folds", c.prune_folds);
  c.ridge = j.value("ridge", c.ridge);
  c.split_ridge = j.value("split_ridge", c.split_ridge);
  c.seed = j.value("seed", c.seed);
  c.criterion = parse_split_criterion(j.value("split_criterion", to_string(c.criterion)));
  return c;
}

Json to_json(const ModelTree& tree) {
  const auto& schema = tree.schema();
  const std::string hash = schema.hash();
  std::function<Json(std::size_t)> node_json = [&](std::size_t i) -> Json {
    const auto& n = tree.node(i);
    if (n.is_leaf()) {
      return {{"leaf",
               {{"group", n.group_id},
                {"n", n.n},
                {"prop_played", n.prop_played},
                {"model", to_json(n.model, hash)}}}};
    }
    const auto& s = *n.split;
    Json split{{"feature", schema[s.feature].name},
               {"kind", s.kind == SplitKind::kNumeric ? "numeric" : "category"},
               {"threshold", s.threshold},
               {"gain", s.gain}};
    if (s.kind == SplitKind::kCategory) split["level"] = s.level;
    return {{"split", std::move(split)}, {"left", node_json(n.left)}, {"right", node_json(n.right)}};
  };
  return {{"format", "draftlmt-model"},
          {"library_version", kLibraryVersion},
          {"schema", to_json(schema)},
          {"config", to_json(tree.config())},
          {"training_years", tree.training_years()},
          {"tree", node_json(0)}};
}

ModelTree model_tree_from_json(const Json& j) {
  const FeatureSchema schema = schema_from_json(j.at("schema"));
  const TreeConfig config = j.contains("config") ? tree_config_from_json(j.at("config")) : TreeConfig{};
  std::set<int> years;
  if (j.contains("training_years")) years = j.at("training_years").get<std::set<int>>();

  std::vector<TreeNode> nodes;
  std::vector<std::pair<std::size_t, int>> declared_groups;
  std::function<std::size_t(const Json&)> read = [&](const Json& e) -> std::size_t {
    const std::size_t index = nodes.size();
    nodes.emplace_back();
    if (e.contains("leaf")) {
      const auto& leaf = e.at("leaf");
      nodes[index].model = logistic_model_from_json(leaf.value("model", Json::object()), schema);
      nodes[index].n = leaf.value("n", std::size_t{0});
      nodes[index].prop_played = leaf.value("prop_played", 0.0);
      if (leaf.contains("group")) declared_groups.emplace_back(index, leaf.at("group").get<int>());
      return index;
    }
    const auto& s = e.at("split");
    const std::string name = s.at("feature").get<std::string>();
    const auto feature = schema.index_of(name);
    if (!feature) throw SchemaMismatchError("split on unknown feature " + name);
    Split split;
    split.feature = *feature;
    split.kind = s.value("kind", std::string("numeric")) == "category" ? SplitKind::kCategory
                                                                       : SplitKind::kNumeric;
    split.threshold = split.kind == SplitKind::kCategory ? 0.5 : s.at("threshold").get<double>();
    split.level = s.value("level", schema[*feature].level);
    split.gain = s.value("gain", 0.0);
    nodes[index].split = split;
    nodes[index].model = LogisticModel::constant(0.0, schema.width());
    const std::size_t l = read(e.at("left"));
    const std::size_t r = read(e.at("right"));
    nodes[index].left = l;
    nodes[index].right = r;
    return index;
  };
  read(j.at("tree"));

  ModelTree tree(schema, std::move(nodes), config, std::move(years));
  for (const auto& [index, group] : declared_groups) {
    if (tree.node(index).group_id != group) {
      throw Error("leaf declares group " + std::to_string(group) + " but its left-to-right position is " +
                  std::to_string(tree.node(index).group_id));
    }
  }
  return tree;
}

Json to_json(const PruneReport& r) {
  return {{"alphas", r.alphas}, {"leaf_counts", r.leaf_counts}, {"cv_loss", r.cv_loss},
          {"cv_se", r.cv_se},   {"best", r.best},               {"chosen", r.chosen}};
}

Json to_json(const EvaluationReport& r) {
  return {{"train_years", r.train_years},
          {"test_years", r.test_years},
          {"n_test", r.n_test},
          {"draft_order_src", r.draft_order_src},
          {"model_src", r.model_src},
          {"model_accuracy", r.model_accuracy},
          {"draft_order_pearson_ranks", r.draft_order_pearson_ranks},
          {"model_pearson_ranks", r.model_pearson_ranks},
          {"ties",
           {{"outcome", r.outcome_ties}, {"model", r.model_ties}, {"draft_order", r.draft_order_ties}}},
          {"tie_policy", "average"},
          {"in_sample", r.in_sample},
          {"overall_in_features", r.overall_in_features},
          {"schema_hash", r.schema_hash}};
}

Json to_json(const GroupProfile& p, const FeatureSchema& schema) {
  Json j{{"group", p.group_id}, {"n", p.n}, {"defined", p.defined()}, {"prop_played", p.prop_played}};
  Json means = Json::object();
  if (p.defined()) {
    for (std::size_t k = 0; k < schema.width(); ++k) means[schema[k].name] = p.mean_features[k];
  }
  j["mean_features"] = std::move(means);
  j["gp_quartiles"] = p.gp_quartiles ? quartiles_json(*p.gp_quartiles) : Json(nullptr);
  j["position_counts"] = p.position_counts;
  return j;
}

Json to_json(const Attribution& a, const FeatureSchema& schema) {
  Json contributions = Json::object();
  for (std::size_t k = 0; k < schema.width(); ++k) contributions[schema[k].name] = a.contributions[k];
  return {{"id", a.id},
          {"group", a.group_id},
          {"total_log_odds_diff", a.total},
          {"contributions", std::move(contributions)},
          {"strongest", contributions_json(a.strongest)},
          {"weakest", contributions_json(a.weakest)}};
}

Json to_json(const std::vector<GroupTopPlayers>& report, const FeatureSchema& schema) {
  Json out = Json::array();
  for (const auto& g : report) {
    Json players = Json::array();
    for (const auto& p : g.players) {
      players.push_back({{"id", p.id},
                         {"draft_year", p.draft_year},
                         {"probability", p.probability},
                         {"attribution", to_json(p.attribution, schema)}});
    }
    out.push_back({{"group", g.group_id}, {"players", std::move(players)}});
  }
  return out;
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& j) {
  write_text(path, j.dump(2) + "\n");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace draftlmt
