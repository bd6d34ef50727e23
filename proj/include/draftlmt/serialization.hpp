#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "draftlmt/analysis.hpp"
#include "draftlmt/dataset.hpp"
#include "draftlmt/evaluation.hpp"
#include "draftlmt/logistic.hpp"
#include "draftlmt/tree.hpp"

namespace draftlmt {

using Json = nlohmann::json;

inline constexpr const char* kLibraryVersion = "0.1.0";

Json to_json(const ValidationReport& report);

Json to_json(const FeatureSchema& schema);
FeatureSchema schema_from_json(const Json& j);

Json to_json(const Dataset& data);
Dataset dataset_from_json(const Json& j);

// {schema_hash, intercept, weights, standardization: [[mean, scale]...],
// diagnostics}
Json to_json(const LogisticModel& model, const std::string& schema_hash);
// Accepts the full form or a hand-written shorthand: "probability" in place
// of "intercept", weights as an object keyed by feature name, and omitted
// standardization (identity).
LogisticModel logistic_model_from_json(const Json& j, const FeatureSchema& schema);

Json to_json(const TreeConfig& config);
TreeConfig tree_config_from_json(const Json& j);

// Nested node objects: {"split": {...}, "left": ..., "right": ...} or
// {"leaf": {"group": g, "n": ..., "prop_played": ..., "model": ...}}.
// Splits name their feature. Growth-time models are not written.
Json to_json(const ModelTree& tree);
ModelTree model_tree_from_json(const Json& j);

Json to_json(const PruneReport& report);
Json to_json(const EvaluationReport& report);
Json to_json(const GroupProfile& profile, const FeatureSchema& schema);
Json to_json(const Attribution& attribution, const FeatureSchema& schema);
Json to_json(const std::vector<GroupTopPlayers>& report, const FeatureSchema& schema);

Json read_json(const std::filesystem::path& path);
// Pretty-printed with a trailing newline; byte-stable for equal values.
void write_json(const std::filesystem::path& path, const Json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace draftlmt
