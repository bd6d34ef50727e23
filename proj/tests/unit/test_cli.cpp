#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "draftlmt/cli.hpp"
#include "draftlmt/error.hpp"
#include "draftlmt/serialization.hpp"

namespace fs = std::filesystem;
using namespace draftlmt;

namespace {

const std::string kFixture = std::string(DRAFTLMT_SOURCE_DIR) + "/data/synthetic_draft.csv";

struct Result {
  int code;
  std::string out, err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("draftlmt_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Result run(std::vector<std::string> args, bool with_out = true) {
    if (with_out) {
      args.push_back("--out");
      args.push_back((dir_ / "out").string());
    }
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
  }

  std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path out() const { return dir_ / "out"; }

  void ingest_and_train() {
    ASSERT_EQ(run({"ingest", "--data", kFixture}).code, 0);
    ASSERT_EQ(run({"train", "--train-years", "2001-2003"}).code, 0);
  }

  fs::path dir_;
};

Json error_of(const Result& r) { return Json::parse(r.err.substr(0, r.err.find('\n'))); }

}  // namespace

TEST(ParseYearList, RangesAndLists) {
  EXPECT_EQ(parse_year_list("2001,2003-2005"), (std::vector<int>{2001, 2003, 2004, 2005}));
  EXPECT_EQ(parse_year_list(" 2004 , 2004"), (std::vector<int>{2004}));
  EXPECT_TRUE(parse_year_list("").empty());
  EXPECT_THROW(parse_year_list("20x1"), ValidationError);
  EXPECT_THROW(parse_year_list("2005-2001"), ValidationError);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run({}, false).code, kExitUsage);
  const Result r = run({"frobnicate"}, false);
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_EQ(error_of(r)["error"]["kind"], "usage");
  EXPECT_EQ(run({"train", "--min-leaf", "-3"}).code, kExitUsage);
  EXPECT_EQ(run({"explain"}).code, kExitUsage);
  EXPECT_EQ(run({"--help"}, false).code, kExitOk);
}

TEST_F(Cli, IngestIsByteStable) {
  ASSERT_EQ(run({"ingest", "--data", kFixture}).code, 0);
  const std::string cache = slurp(out() / "dataset_cache.json");
  const std::string report = slurp(out() / "validation_report.json");
  ASSERT_EQ(run({"ingest", "--data", kFixture}).code, 0);
  EXPECT_EQ(slurp(out() / "dataset_cache.json"), cache);
  EXPECT_EQ(slurp(out() / "validation_report.json"), report);
  const Json j = Json::parse(report);
  EXPECT_EQ(j["provenance"]["tool"], "draftlmt");
  EXPECT_EQ(j["provenance"]["inputs"]["data"].get<std::string>().size(), 64u);
  EXPECT_GT(j["report"]["goalies_excluded"].get<int>(), 0);
  EXPECT_FALSE(j["report"]["merges"].empty());
}

TEST_F(Cli, MissingColumnNamesIt) {
  std::ifstream in(kFixture);
  std::string header, line, body;
  std::getline(in, header);
  header.replace(header.find("rs_PIM"), 6, "rs_PenaltyMinutes");
  while (std::getline(in, line)) body += line + "\n";
  std::ofstream(dir_ / "bad.csv") << header << "\n" << body;
  const Result r = run({"ingest", "--data", (dir_ / "bad.csv").string()});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_NE(error_of(r)["error"]["message"].get<std::string>().find("rs_PIM"), std::string::npos);
}

TEST_F(Cli, TrainTagsYearsAndRejectsEmptySelection) {
  ASSERT_EQ(run({"ingest", "--data", kFixture}).code, 0);
  EXPECT_EQ(run({"train", "--train-years", "1990"}).code, kExitValidation);
  ASSERT_EQ(run({"train", "--train-years", "2001-2003"}).code, 0);
  const Json model = read_json(out() / "model.json");
  EXPECT_EQ(model["model"]["training_years"], Json({2001, 2002, 2003}));
  EXPECT_EQ(model["provenance"]["config"]["train_years"], "2001-2003");
  EXPECT_EQ(model["provenance"]["schema_hash"], model["model"]["schema"]["hash"]);
  const std::string bytes = slurp(out() / "model.json");
  ASSERT_EQ(run({"train", "--train-years", "2001-2003"}).code, 0);
  EXPECT_EQ(slurp(out() / "model.json"), bytes);
}

TEST_F(Cli, ConfigFileAndFlagPrecedence) {
  ASSERT_EQ(run({"ingest", "--data", kFixture}).code, 0);
  std::ofstream(dir_ / "run.ini") << "train-years = 2001-2003\nmin-leaf = 17\nseed = 3\n";
  ASSERT_EQ(run({"train", "--config", (dir_ / "run.ini").string(), "--seed", "8"}).code, 0);
  const Json model = read_json(out() / "model.json");
  EXPECT_EQ(model["model"]["config"]["min_leaf"], 17);
  EXPECT_EQ(model["model"]["config"]["seed"], 8);
  EXPECT_EQ(model["model"]["training_years"], Json({2001, 2002, 2003}));
}

TEST_F(Cli, EvaluateFlagsInSampleAndWritesRanking) {
  ingest_and_train();
  Result r = run({"evaluate", "--test-years", "2004"});
  ASSERT_EQ(r.code, 0) << r.err;
  Json report = read_json(out() / "evaluation_report.json")["report"];
  EXPECT_FALSE(report["in_sample"].get<bool>());
  EXPECT_FALSE(report["overall_in_features"].get<bool>());
  EXPECT_EQ(report["test_years"], Json({2004}));
  const std::string ranking = slurp(out() / "ranking.csv");
  EXPECT_EQ(static_cast<std::size_t>(std::count(ranking.begin(), ranking.end(), '\n')),
            report["n_test"].get<std::size_t>() + 1);
  r = run({"evaluate", "--test-years", "2002"});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(read_json(out() / "evaluation_report.json")["report"]["in_sample"].get<bool>());
}

TEST_F(Cli, SchemaMismatchExitsFour) {
  ingest_and_train();
  const std::string other = (dir_ / "other_cache.json").string();
  ASSERT_EQ(run({"ingest", "--data", kFixture, "--exclude", "rs_G", "--cache", other}).code, 0);
  const Result r = run({"evaluate", "--test-years", "2004", "--cache", other});
  EXPECT_EQ(r.code, kExitMismatch);
  EXPECT_EQ(error_of(r)["error"]["kind"], "schema_mismatch");
}

TEST_F(Cli, GroupsBundleMatchesModelNumbering) {
  ingest_and_train();
  ASSERT_EQ(run({"groups"}).code, 0);
  for (const char* f : {"groups.json", "boxplot.csv", "group_means.csv", "weights.csv", "positions.csv",
                        "proportion_curves.csv", "top_players.json"}) {
    EXPECT_TRUE(fs::exists(out() / "groups" / f)) << f;
  }
  const Json model = read_json(out() / "model.json");
  const ModelTree tree = model_tree_from_json(model["model"]);
  const Json groups = read_json(out() / "groups" / "groups.json")["groups"];
  ASSERT_EQ(groups.size(), tree.leaf_count());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    EXPECT_EQ(groups[g]["group"], g + 1);
    EXPECT_EQ(groups[g]["n"], tree.leaf_for_group(static_cast<int>(g + 1)).n);
  }
}

TEST_F(Cli, ExplainTotalsAreLogOddsDifferences) {
  ingest_and_train();
  Result r = run({"explain", "--top", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json top = read_json(out() / "explain_top.json")["top"];
  const ModelTree tree = model_tree_from_json(read_json(out() / "model.json")["model"]);
  EXPECT_EQ(top.size(), tree.leaf_count());
  for (const auto& g : top) {
    ASSERT_EQ(g["players"].size(), 1u);
    const auto& p = g["players"][0];
    EXPECT_EQ(p["strongest"].size(), 3u);
    const double diff = p["log_odds"].get<double>() - p["group_mean_log_odds"].get<double>();
    EXPECT_NEAR(p["total_log_odds_diff"].get<double>(), diff, 1e-10);
    double sum = 0;
    for (const auto& [name, c] : p["contributions"].items()) sum += c.get<double>();
    EXPECT_NEAR(sum, diff, 1e-10);
  }
  const std::string id = top[0]["players"][0]["id"];
  r = run({"explain", "--player", id});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_json(out() / ("explain_" + id + ".json"))["player"]["id"], id);
}

TEST_F(Cli, UnknownPlayerExitsThree) {
  ingest_and_train();
  const Result r = run({"explain", "--player", "nobody"});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_NE(error_of(r)["error"]["message"].get<std::string>().find("nobody"), std::string::npos);
}

TEST_F(Cli, MissingInputsAreValidationErrors) {
  EXPECT_EQ(run({"train", "--train-years", "2001"}).code, kExitValidation);
  EXPECT_EQ(run({"ingest", "--data", (dir_ / "absent.csv").string()}).code, kExitValidation);
}

TEST_F(Cli, HandWrittenModelLoads) {
  // The bundled example tree uses the standard schema, so it can rank the
  // fixture directly.
  ASSERT_EQ(run({"ingest", "--data", kFixture}).code, 0);
  const Result r = run({"evaluate", "--test-years", "2004", "--model",
                     std::string(DRAFTLMT_SOURCE_DIR) + "/tests/data/example_tree.json"});
  EXPECT_EQ(r.code, 0) << r.err;
}
