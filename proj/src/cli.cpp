#include "draftlmt/cli.hpp"

#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "draftlmt/analysis.hpp"
#include "draftlmt/dataset.hpp"
#include "draftlmt/error.hpp"
#include "draftlmt/evaluation.hpp"
#include "draftlmt/hash.hpp"
#include "draftlmt/serialization.hpp"
#include "draftlmt/tree.hpp"

namespace draftlmt {
namespace fs = std::filesystem;

namespace {

struct RunConfig {
  std::string data;
  std::string out = "out";
  std::string cache;  // defaults to <out>/dataset_cache.json
  std::string model;  // defaults to <out>/model.json
  std::string train_years;
  std::string test_years;
  std::vector<std::string> include;
  std::vector<std::string> exclude;
  std::string height_unit = "cm";
  std::string weight_unit = "kg";
  std::string criterion = "linear-likelihood";
  TreeConfig tree;
  bool verbose = false;

  // explain
  std::string player;
  int player_year = 0;
  std::size_t top = 0;
  std::size_t k = 3;

  fs::path cache_path() const { return cache.empty() ? fs::path(out) / "dataset_cache.json" : fs::path(cache); }
  fs::path model_path() const { return model.empty() ? fs::path(out) / "model.json" : fs::path(model); }
};

// The output directory is left out so that runs into different directories
// stay comparable.
Json snapshot(const RunConfig& c) {
  TreeConfig tree = c.tree;
  tree.criterion = parse_split_criterion(c.criterion);
  return {{"data", c.data},
          {"train_years", c.train_years},
          {"test_years", c.test_years},
          {"include", c.include},
          {"exclude", c.exclude},
          {"height_unit", c.height_unit},
          {"weight_unit", c.weight_unit},
          {"tree", to_json(tree)}};
}

Json provenance(const RunConfig& c, const Json& inputs, const std::string& schema_hash) {
  return {{"tool", "draftlmt"},
          {"version", kLibraryVersion},
          {"config", snapshot(c)},
          {"inputs", inputs},
          {"schema_hash", schema_hash}};
}

void log(const RunConfig& c, const std::string& message) {
  if (c.verbose) std::clog << "draftlmt: " << message << '\n';
}

std::set<int> year_set(const std::string& text) {
  const auto years = parse_year_list(text);
  return {years.begin(), years.end()};
}

struct Cache {
  Dataset data;
  std::string data_hash;
  std::string file_hash;
};

Cache load_cache(const RunConfig& c) {
  const fs::path path = c.cache_path();
  if (!fs::exists(path)) throw ValidationError("dataset cache " + path.string() + " not found; run ingest first");
  const Json j = read_json(path);
  return {dataset_from_json(j.at("dataset")), j.at("provenance").at("inputs").at("data").get<std::string>(),
          sha256_file(path)};
}

ModelTree load_model(const RunConfig& c, std::string* file_hash) {
  const fs::path path = c.model_path();
  if (!fs::exists(path)) throw ValidationError("model " + path.string() + " not found; run train first");
  *file_hash = sha256_file(path);
  const Json j = read_json(path);
  // Bare model documents (hand-written trees) are accepted too.
  return model_tree_from_json(j.contains("model") ? j.at("model") : j);
}

Dataset nonempty_years(const Dataset& data, const std::set<int>& years, const std::string& what) {
  Dataset out = select_years(data, years);
  if (out.empty()) throw ValidationError(what + " selection is empty");
  return out;
}

int cmd_ingest(const RunConfig& c, std::ostream& out) {
  if (c.data.empty()) throw CLI::RequiredError("--data");
  ColumnMap columns = ColumnMap::defaults();
  columns.height_unit = parse_length_unit(c.height_unit);
  columns.weight_unit = parse_mass_unit(c.weight_unit);
  const std::string data_hash = sha256_file(c.data);

  ValidationReport report;
  auto rows = load_csv(c.data, columns, &report);
  rows = preprocess(std::move(rows), report);
  const FeatureSchema schema = FeatureSchema::standard(c.include, c.exclude);
  const Dataset data = encode(rows, schema);
  log(c, std::to_string(data.size()) + " players encoded over " + std::to_string(schema.width()) + " features");

  const Json inputs{{"data", data_hash}};
  const Json prov = provenance(c, inputs, schema.hash());
  write_json(fs::path(c.out) / "validation_report.json", {{"provenance", prov}, {"report", to_json(report)}});
  write_json(c.cache_path(), {{"provenance", prov}, {"dataset", to_json(data)}});
  out << "ingested " << data.size() << " players (" << report.goalies_excluded << " goalies excluded, "
      << report.imputations.size() << " CSS ranks imputed, " << report.flags.size() << " flags)\n";
  return kExitOk;
}

int cmd_train(const RunConfig& c, std::ostream& out) {
  const Cache cache = load_cache(c);
  TreeConfig config = c.tree;
  config.criterion = parse_split_criterion(c.criterion);
  const Dataset train = nonempty_years(cache.data, year_set(c.train_years), "training");
  log(c, "training on " + std::to_string(train.size()) + " players");

  ModelTree tree = grow(train, config);
  std::optional<PruneReport> pruning;
  if (config.prune_folds >= 2) {
    auto pruned = prune_with_report(tree, train, config.prune_folds);
    tree = std::move(pruned.tree);
    pruning = std::move(pruned.report);
  }
  tree.set_training_years(train.years());

  const Json inputs{{"data", cache.data_hash}, {"cache", cache.file_hash}};
  Json j{{"provenance", provenance(c, inputs, train.schema.hash())}, {"model", to_json(tree)}};
  j["pruning"] = pruning ? to_json(*pruning) : Json(nullptr);
  write_json(c.model_path(), j);
  out << "trained a tree with " << tree.leaf_count() << " groups on " << train.size() << " players\n";
  return kExitOk;
}

int cmd_evaluate(const RunConfig& c, std::ostream& out) {
  const Cache cache = load_cache(c);
  std::string model_hash;
  const ModelTree tree = load_model(c, &model_hash);
  tree.check_schema(cache.data.schema);
  const Dataset test = nonempty_years(cache.data, year_set(c.test_years), "test");
  const Evaluation evaluation = evaluate_with_rankings(tree, test);

  const Json inputs{{"data", cache.data_hash}, {"cache", cache.file_hash}, {"model", model_hash}};
  write_json(fs::path(c.out) / "evaluation_report.json",
             {{"provenance", provenance(c, inputs, tree.schema().hash())},
              {"report", to_json(evaluation.report)}});
  write_text(fs::path(c.out) / "ranking.csv", ranking_csv(evaluation.rows));
  const auto& r = evaluation.report;
  out << "n=" << r.n_test << " draft-order SRC=" << r.draft_order_src << " model SRC=" << r.model_src
      << " accuracy=" << r.model_accuracy << (r.in_sample ? " (in-sample)" : "") << '\n';
  return kExitOk;
}

// Reference cohort for profiles: the model's training years, or the
// configured ones when the model carries none.
Dataset reference_cohort(const RunConfig& c, const ModelTree& tree, const Dataset& data) {
  const std::set<int> years = tree.training_years().empty() ? year_set(c.train_years) : tree.training_years();
  return nonempty_years(data, years, "reference cohort");
}

int cmd_groups(const RunConfig& c, std::ostream& out) {
  const Cache cache = load_cache(c);
  std::string model_hash;
  const ModelTree tree = load_model(c, &model_hash);
  tree.check_schema(cache.data.schema);
  const Dataset cohort = reference_cohort(c, tree, cache.data);
  const auto profiles = profile_groups(tree, cohort);

  const fs::path dir = fs::path(c.out) / "groups";
  const Json inputs{{"data", cache.data_hash}, {"cache", cache.file_hash}, {"model", model_hash}};
  Json groups = Json::array();
  for (const auto& p : profiles) groups.push_back(to_json(p, tree.schema()));
  write_json(dir / "groups.json",
             {{"provenance", provenance(c, inputs, tree.schema().hash())}, {"groups", std::move(groups)}});
  write_text(dir / "boxplot.csv", boxplot_csv(profiles));
  write_text(dir / "group_means.csv", group_means_csv(profiles, tree.schema()));
  write_text(dir / "weights.csv", weight_table_csv(tree));
  write_text(dir / "positions.csv", position_distribution_csv(profiles));
  std::vector<std::string> curve_features;
  for (const auto& f : tree.schema().features()) {
    if (f.kind == FeatureKind::kNumeric) curve_features.push_back(f.name);
  }
  write_text(dir / "proportion_curves.csv", proportion_curves_csv(tree, cohort, curve_features));
  write_json(dir / "top_players.json",
             {{"provenance", provenance(c, inputs, tree.schema().hash())},
              {"groups", to_json(top_players(tree, cohort, profiles, 1, c.k), tree.schema())}});
  out << profiles.size() << " group profiles written to " << dir.string() << '\n';
  return kExitOk;
}

Json explained(const ModelTree& tree, const std::vector<GroupProfile>& profiles, const Example& row,
               std::size_t k) {
  const Attribution a = explain(tree, profiles, row, k);
  const auto& profile = profiles.at(static_cast<std::size_t>(a.group_id - 1));
  const auto& model = tree.leaf_for_group(a.group_id).model;
  Json j = to_json(a, tree.schema());
  j["draft_year"] = row.draft_year;
  j["probability"] = tree.predict(row.x);
  j["log_odds"] = model.log_odds(row.x);
  j["group_mean_log_odds"] = model.log_odds(profile.mean_features);
  return j;
}

int cmd_explain(const RunConfig& c, std::ostream& out) {
  if (c.player.empty() == (c.top == 0)) throw CLI::ValidationError("explain needs exactly one of --player or --top");
  const Cache cache = load_cache(c);
  std::string model_hash;
  const ModelTree tree = load_model(c, &model_hash);
  tree.check_schema(cache.data.schema);
  const Dataset cohort = reference_cohort(c, tree, cache.data);
  const auto profiles = profile_groups(tree, cohort);

  Json body;
  if (!c.player.empty()) {
    std::vector<const Example*> matches;
    for (const auto& row : cache.data.rows) {
      if (row.id == c.player && (c.player_year == 0 || row.draft_year == c.player_year)) matches.push_back(&row);
    }
    if (matches.empty()) throw ValidationError("unknown player id " + c.player);
    if (matches.size() > 1) throw ValidationError("player id " + c.player + " is ambiguous; pass --year");
    body = {{"player", explained(tree, profiles, *matches.front(), c.k)}};
  } else {
    Json groups = Json::array();
    for (const auto& g : top_players(tree, cohort, profiles, c.top, c.k)) {
      Json players = Json::array();
      for (const auto& p : g.players) {
        const auto it = std::find_if(cohort.rows.begin(), cohort.rows.end(), [&](const Example& e) {
          return e.id == p.id && e.draft_year == p.draft_year;
        });
        players.push_back(explained(tree, profiles, *it, c.k));
      }
      groups.push_back({{"group", g.group_id}, {"players", std::move(players)}});
    }
    body = {{"top", std::move(groups)}};
  }
  const Json inputs{{"data", cache.data_hash}, {"cache", cache.file_hash}, {"model", model_hash}};
  Json j{{"provenance", provenance(c, inputs, tree.schema().hash())}};
  j.update(body);
  const std::string name = c.player.empty() ? "explain_top.json" : "explain_" + c.player + ".json";
  write_json(fs::path(c.out) / name, j);
  out << j.dump(2) << '\n';
  return kExitOk;
}

void report_error(std::ostream& err, int code, const std::string& kind, const std::string& message) {
  err << Json{{"error", {{"code", code}, {"kind", kind}, {"message", message}}}}.dump() << '\n';
}

}  // namespace

std::vector<int> parse_year_list(const std::string& text) {
  std::set<int> years;
  std::stringstream in(text);
  std::string item;
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw ValidationError("bad year '" + s + "' in '" + text + "'");
    return v;
  };
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    if (item.empty()) continue;
    const auto dash = item.find('-', 1);
    if (dash == std::string::npos) {
      years.insert(number(item));
    } else {
      const int lo = number(item.substr(0, dash)), hi = number(item.substr(dash + 1));
      if (hi < lo) throw ValidationError("empty year range '" + item + "'");
      for (int y = lo; y <= hi; ++y) years.insert(y);
    }
  }
  return {years.begin(), years.end()};
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Logistic model trees for draft prospect ranking", "draftlmt"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key=value configuration file; flags win");
  app.set_version_flag("--version", kLibraryVersion);
  app.add_option("--data", c.data, "Input CSV");
  app.add_option("--out", c.out, "Output directory")->capture_default_str();
  app.add_option("--cache", c.cache, "Encoded dataset (default <out>/dataset_cache.json)");
  app.add_option("--model", c.model, "Model file (default <out>/model.json)");
  app.add_option("--train-years", c.train_years, "e.g. 1998-2000");
  app.add_option("--test-years", c.test_years, "e.g. 2001");
  app.add_option("--include", c.include, "Keep only these feature sources")->delimiter(',');
  app.add_option("--exclude", c.exclude, "Drop these feature sources")->delimiter(',');
  app.add_option("--height-unit", c.height_unit)->check(CLI::IsMember({"cm", "in"}))->capture_default_str();
  app.add_option("--weight-unit", c.weight_unit)->check(CLI::IsMember({"kg", "lb"}))->capture_default_str();
  app.add_option("--seed", c.tree.seed, "Cross-validation fold seed")->capture_default_str();
  app.add_option("--min-leaf", c.tree.min_leaf)->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--min-split", c.tree.min_split)->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--min-gain", c.tree.min_gain)->check(CLI::NonNegativeNumber)->capture_default_str();
  app.add_option("--max-depth", c.tree.max_depth)->check(CLI::Range(0, 64))->capture_default_str();
  app.add_option("--max-leaves", c.tree.max_leaves)->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--boost-stages", c.tree.boost_stages)->check(CLI::Range(0, 10000))->capture_default_str();
  app.add_option("--prune-folds", c.tree.prune_folds, "< 2 disables pruning")
      ->check(CLI::Range(0, 100))
      ->capture_default_str();
  app.add_option("--ridge", c.tree.ridge)->check(CLI::NonNegativeNumber)->capture_default_str();
  app.add_option("--split-ridge", c.tree.split_ridge)->check(CLI::NonNegativeNumber)->capture_default_str();
  app.add_option("--split-criterion", c.criterion)
      ->check(CLI::IsMember({"linear-likelihood", "entropy"}))
      ->capture_default_str();
  app.add_flag("--verbose", c.verbose, "Progress on stderr");

  auto* ingest = app.add_subcommand("ingest", "Validate and encode a CSV");
  auto* train = app.add_subcommand("train", "Grow and prune a model tree");
  auto* evaluate = app.add_subcommand("evaluate", "Rank held-out years");
  auto* groups = app.add_subcommand("groups", "Group profiles and plot tables");
  auto* explain_cmd = app.add_subcommand("explain", "Per-player log-odds attribution");
  explain_cmd->add_option("--player", c.player, "Player id");
  explain_cmd->add_option("--year", c.player_year, "Draft year, when the id repeats");
  explain_cmd->add_option("--top", c.top, "Top N players per group")->check(CLI::PositiveNumber);
  explain_cmd->add_option("-k", c.k, "Strongest and weakest features to list")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kLibraryVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, kExitUsage, "usage", e.what());
    return kExitUsage;
  }

  try {
    if (*ingest) return cmd_ingest(c, out);
    if (*train) return cmd_train(c, out);
    if (*evaluate) return cmd_evaluate(c, out);
    if (*groups) return cmd_groups(c, out);
    return cmd_explain(c, out);
  } catch (const CLI::Error& e) {
    report_error(err, kExitUsage, "usage", e.what());
    return kExitUsage;
  } catch (const SchemaMismatchError& e) {
    report_error(err, kExitMismatch, "schema_mismatch", e.what());
    return kExitMismatch;
  } catch (const Json::exception& e) {
    report_error(err, kExitMismatch, "malformed_file", e.what());
    return kExitMismatch;
  } catch (const Error& e) {
    report_error(err, kExitValidation, "validation", e.what());
    return kExitValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    report_error(err, kExitValidation, "io", e.what());
    return kExitValidation;
  }
}

}  // namespace draftlmt
