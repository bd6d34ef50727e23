#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace draftlmt {

// Draft-year statistics for one competition (regular season or playoffs).
struct SeasonStats {
  double gp = 0;
  double goals = 0;
  double assists = 0;
  double points = 0;
  double pim = 0;
  double plus_minus = 0;
};

// One CSV record after parsing. Country holds the raw nationality until
// pool_countries() maps it onto {CAN, USA, EURO}.
struct RawRow {
  std::size_t line = 0;
  std::string id;
  int draft_year = 0;
  double draft_age = 0;
  std::string country;
  std::string position;  // L, R, C or D
  int overall_pick = 0;
  std::optional<int> css_rank;
  bool css_imputed = false;
  double height_cm = 0;
  double weight_kg = 0;
  SeasonStats rs;
  SeasonStats po;
  double sum_7yr_gp = 0;
  double sum_7yr_toi = 0;
  bool played_flag = false;  // GP_greater_than_0 as recorded in the file

  bool played_any() const { return sum_7yr_gp > 0; }
};

enum class LengthUnit { kCentimetres, kInches };
enum class MassUnit { kKilograms, kPounds };

// Maps canonical field names (the dataset's published column names) to the
// header names found in a particular file, plus the units of the body
// measurements in that file.
struct ColumnMap {
  std::map<std::string, std::string> columns;
  LengthUnit height_unit = LengthUnit::kCentimetres;
  MassUnit weight_unit = MassUnit::kKilograms;

  static ColumnMap defaults();
  // Canonical names that must be present in every input file.
  static const std::vector<std::string>& required_fields();
  std::string header_for(const std::string& field) const;
};

struct ValidationReport {
  struct Imputation {
    std::string id;
    int draft_year;
    int css_rank;
  };
  struct Pooling {
    std::string id;
    int draft_year;
    std::string from;
    std::string to;
  };
  struct Merge {
    std::string id;
    int draft_year;
    std::size_t entries;
  };
  struct Flag {
    std::string id;
    int draft_year;
    std::size_t line;
    std::string kind;
    std::string detail;
  };

  std::size_t rows_read = 0;
  std::size_t goalies_excluded = 0;
  std::vector<Imputation> imputations;
  std::vector<Pooling> poolings;
  std::vector<Merge> merges;
  std::vector<Flag> flags;
};

// Reads a comma-separated file with a header row. Goalies are dropped.
// Empty or "NA" performance cells read as 0; an empty or "NA" CSS rank reads
// as unranked.
std::vector<RawRow> load_csv(const std::filesystem::path& path, const ColumnMap& columns,
                             ValidationReport* report = nullptr);
std::vector<RawRow> parse_csv(std::string_view text, const ColumnMap& columns,
                              ValidationReport* report = nullptr);

// Unranked players get 1 + the largest CSS rank among ranked players of the
// same draft year. Throws ValidationError for a year with no ranked player.
std::vector<RawRow> impute_css_rank(std::vector<RawRow> rows, ValidationReport* report = nullptr);

// CAN and USA are kept, every other nationality becomes EURO.
RawRow pool_countries(RawRow row);
std::vector<RawRow> pool_countries(std::vector<RawRow> rows, ValidationReport* report = nullptr);

// Sums the per-team entries of a player within one draft year. Demographic
// and outcome columns must agree across entries.
std::vector<RawRow> aggregate_multi_team(std::vector<RawRow> rows,
                                         ValidationReport* report = nullptr);

// Records (without altering rows) points that don't equal goals + assists and
// a played flag that disagrees with the games-played total.
void flag_inconsistencies(const std::vector<RawRow>& rows, ValidationReport& report);

// pool -> aggregate -> impute -> flag.
std::vector<RawRow> preprocess(std::vector<RawRow> rows, ValidationReport& report);

enum class FeatureKind { kNumeric, kOneHot };

struct FeatureDescriptor {
  std::string name;
  FeatureKind kind = FeatureKind::kNumeric;
  std::string source;
  std::string level;  // one-hot only

  bool operator==(const FeatureDescriptor&) const = default;
};

struct DecodedLevels {
  std::optional<std::string> country;
  std::optional<std::string> position;
};

class FeatureSchema {
 public:
  FeatureSchema() = default;
  explicit FeatureSchema(std::vector<FeatureDescriptor> features);

  // Default feature set: every numeric source except Overall, plus the
  // Country and Position one-hot blocks. `include` (when non-empty) keeps only
  // the named sources; `exclude` removes sources. Canonical order is kept.
  static FeatureSchema standard(const std::vector<std::string>& include = {},
                                const std::vector<std::string>& exclude = {});
  static const std::vector<std::string>& numeric_sources();
  static const std::vector<std::string>& country_levels();
  static const std::vector<std::string>& position_levels();

  std::size_t width() const { return features_.size(); }
  const std::vector<FeatureDescriptor>& features() const { return features_; }
  const FeatureDescriptor& operator[](std::size_t i) const { return features_[i]; }
  std::optional<std::size_t> index_of(std::string_view name) const;
  bool uses_source(std::string_view source) const;

  std::vector<double> encode(const RawRow& row) const;
  DecodedLevels decode(std::span<const double> x) const;

  // SHA-256 over the canonical feature list.
  std::string hash() const;

  bool operator==(const FeatureSchema&) const = default;

 private:
  std::vector<FeatureDescriptor> features_;
};

struct Example {
  std::string id;
  int draft_year = 0;
  std::vector<double> x;
  int label = 0;
  double sum_7yr_gp = 0;
  double sum_7yr_toi = 0;
  int overall_pick = 0;
  std::string country;
  std::string position;
};

struct Dataset {
  FeatureSchema schema;
  std::vector<Example> rows;

  std::size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }
  std::set<int> years() const;
  Dataset subset(std::span<const std::size_t> indices) const;
};

// Rows must already be preprocessed. Throws ValidationError on duplicate
// (id, draft_year) or an unpooled nationality.
Dataset encode(const std::vector<RawRow>& rows, const FeatureSchema& schema);

struct YearSplit {
  Dataset train;
  Dataset test;
  std::vector<std::string> warnings;
};

// Throws ValidationError when the year sets overlap.
YearSplit split_by_years(const Dataset& data, const std::set<int>& train_years,
                         const std::set<int>& test_years);
Dataset select_years(const Dataset& data, const std::set<int>& years);

Eigen::MatrixXd design_matrix(const Dataset& data);
Eigen::MatrixXd design_matrix(const Dataset& data, std::span<const std::size_t> rows);
Eigen::VectorXd label_vector(const Dataset& data);
Eigen::VectorXd label_vector(const Dataset& data, std::span<const std::size_t> rows);

std::string to_string(LengthUnit unit);
std::string to_string(MassUnit unit);
LengthUnit parse_length_unit(std::string_view text);
MassUnit parse_mass_unit(std::string_view text);

}  // namespace draftlmt
