#include <gtest/gtest.h>

#include <filesystem>

#include "draftlmt/error.hpp"
#include "draftlmt/serialization.hpp"
#include "draftlmt/synthetic.hpp"
#include "fixtures.hpp"

using namespace draftlmt;

TEST(Serialization, DatasetRoundTrip) {
  ValidationReport report;
  const Dataset d = encode(preprocess(fixture_rows({2001}, 80, 2), report), FeatureSchema::standard());
  const Json j = to_json(d);
  const Dataset back = dataset_from_json(Json::parse(j.dump()));
  EXPECT_EQ(back.schema, d.schema);
  ASSERT_EQ(back.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_EQ(back.rows[i].x, d.rows[i].x);
    EXPECT_EQ(back.rows[i].id, d.rows[i].id);
  }
  EXPECT_EQ(to_json(back).dump(), j.dump());
}

TEST(Serialization, TamperedSchemaHashRejected) {
  Json j = to_json(FeatureSchema::standard());
  j["features"].erase(0);
  EXPECT_THROW(schema_from_json(j), SchemaMismatchError);
}

TEST(Serialization, LogisticModelExactRoundTrip) {
  const auto schema = numeric_schema(2);
  FitDiagnostics diag;
  diag.iterations = 4;
  diag.converged = true;
  const LogisticModel m(0.1234567890123, {1.0 / 3.0, -2e-17}, {{1.5, 0.3}, {-7, 11}}, diag);
  const LogisticModel back = logistic_model_from_json(Json::parse(to_json(m, schema.hash()).dump()), schema);
  EXPECT_EQ(back, m);
  EXPECT_THROW(logistic_model_from_json(to_json(m, "other"), schema), SchemaMismatchError);
}

TEST(Serialization, HandWrittenShorthand) {
  const auto schema = numeric_schema(2);
  const auto m = logistic_model_from_json(Json{{"probability", 0.92}, {"weights", {{"x1", 0.5}}}}, schema);
  EXPECT_NEAR(m.predict_proba(std::vector<double>{3, 0}), 0.92, 1e-15);
  EXPECT_EQ(m.weights()[1], 0.5);
  EXPECT_THROW(logistic_model_from_json(Json{{"weights", {{"nope", 1}}}}, schema), SchemaMismatchError);
  EXPECT_THROW(logistic_model_from_json(Json{{"probability", 1.0}}, schema), Error);
}

TEST(Serialization, TreeGroupDeclarationsChecked) {
  const auto schema = numeric_schema(1);
  Json doc{{"schema", to_json(schema)},
           {"tree",
            {{"split", {{"feature", "x0"}, {"threshold", 1.0}}},
             {"left", {{"leaf", {{"group", 2}, {"model", {{"probability", 0.2}}}}}}},
             {"right", {{"leaf", {{"group", 1}, {"model", {{"probability", 0.8}}}}}}}}}};
  EXPECT_THROW(model_tree_from_json(doc), Error);
  doc["tree"]["left"]["leaf"]["group"] = 1;
  doc["tree"]["right"]["leaf"]["group"] = 2;
  const ModelTree tree = model_tree_from_json(doc);
  EXPECT_EQ(tree.assign_group(std::vector<double>{0.5}), 1);
  doc["tree"]["split"]["feature"] = "x9";
  EXPECT_THROW(model_tree_from_json(doc), SchemaMismatchError);
}

TEST(Serialization, ConfigRoundTrip) {
  TreeConfig c;
  c.min_leaf = 3;
  c.seed = 99;
  c.criterion = SplitCriterion::kEntropy;
  EXPECT_EQ(tree_config_from_json(to_json(c)), c);
}

TEST(Serialization, WriteJsonIsStable) {
  const auto dir = std::filesystem::temp_directory_path() / "draftlmt_ser_test";
  const Json j{{"b", 1.0 / 3.0}, {"a", {1, 2}}};
  write_json(dir / "x.json", j);
  EXPECT_EQ(read_json(dir / "x.json"), j);
  std::filesystem::remove_all(dir);
}
