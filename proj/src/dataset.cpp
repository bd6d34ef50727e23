#include "draftlmt/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "draftlmt/error.hpp"
#include "draftlmt/hash.hpp"

namespace draftlmt {
namespace {

constexpr double kCentimetresPerInch = 2.54;
constexpr double kKilogramsPerPound = 0.45359237;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

bool is_missing(std::string_view cell) {
  cell = trim(cell);
  return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan" || cell == "-";
}

// Splits one CSV record. Quoted fields may contain commas and doubled quotes;
// embedded newlines are not supported.
std::vector<std::string> split_record(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", line_no);
  fields.push_back(std::move(current));
  return fields;
}

double parse_number(std::string_view cell, const std::string& column, std::size_t line_no) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0;
  const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || end != cell.data() + cell.size()) {
    throw ParseError("column " + column + ": not a number: '" + std::string(cell) + "'", line_no);
  }
  return value;
}

int parse_integer(std::string_view cell, const std::string& column, std::size_t line_no) {
  const double value = parse_number(cell, column, line_no);
  if (value != static_cast<double>(static_cast<long long>(value))) {
    throw ParseError("column " + column + ": not an integer: '" + std::string(trim(cell)) + "'",
                     line_no);
  }
  return static_cast<int>(value);
}

bool parse_flag(std::string_view cell, const std::string& column, std::size_t line_no) {
  const std::string v = upper(trim(cell));
  if (v == "1" || v == "TRUE" || v == "YES" || v == "Y") return true;
  if (v == "0" || v == "FALSE" || v == "NO" || v == "N" || v.empty()) return false;
  throw ParseError("column " + column + ": not a boolean: '" + v + "'", line_no);
}

// Returns the normalised position or nullopt for goalies.
std::optional<std::string> parse_position(std::string_view cell, std::size_t line_no) {
  const std::string v = upper(trim(cell));
  if (v == "G") return std::nullopt;
  if (v == "L" || v == "LW") return std::string("L");
  if (v == "R" || v == "RW") return std::string("R");
  if (v == "C") return std::string("C");
  if (v == "D") return std::string("D");
  throw ParseError("column Position: unknown position '" + v + "'", line_no);
}

double numeric_value(const RawRow& row, std::string_view source) {
  if (source == "DraftAge") return row.draft_age;
  if (source == "Height") return row.height_cm;
  if (source == "Weight") return row.weight_kg;
  if (source == "Overall") return row.overall_pick;
  if (source == "CSS_rank") {
    if (!row.css_rank) {
      throw ValidationError("player " + row.id + " has no CSS rank; impute before encoding");
    }
    return *row.css_rank;
  }
  if (source == "rs_GP") return row.rs.gp;
  if (source == "rs_G") return row.rs.goals;
  if (source == "rs_A") return row.rs.assists;
  if (source == "rs_P") return row.rs.points;
  if (source == "rs_PIM") return row.rs.pim;
  if (source == "rs_PlusMinus") return row.rs.plus_minus;
  if (source == "po_GP") return row.po.gp;
  if (source == "po_G") return row.po.goals;
  if (source == "po_A") return row.po.assists;
  if (source == "po_P") return row.po.points;
  if (source == "po_PIM") return row.po.pim;
  if (source == "po_PlusMinus") return row.po.plus_minus;
  throw SchemaError("unknown numeric feature source " + std::string(source));
}

using YearKey = std::pair<std::string, int>;

struct YearKeyHash {
  std::size_t operator()(const YearKey& k) const {
    return std::hash<std::string>()(k.first) ^ (std::hash<int>()(k.second) * 0x9E3779B97F4A7C15ULL);
  }
};

void add_stats(SeasonStats& into, const SeasonStats& from) {
  into.gp += from.gp;
  into.goals += from.goals;
  into.assists += from.assists;
  into.points += from.points;
  into.pim += from.pim;
  into.plus_minus += from.plus_minus;
}

std::string first_demographic_conflict(const RawRow& a, const RawRow& b) {
  if (a.draft_age != b.draft_age) return "DraftAge";
  if (a.country != b.country) return "Country";
  if (a.position != b.position) return "Position";
  if (a.overall_pick != b.overall_pick) return "Overall";
  if (a.css_rank != b.css_rank) return "CSS_rank";
  if (a.height_cm != b.height_cm) return "Height";
  if (a.weight_kg != b.weight_kg) return "Weight";
  if (a.sum_7yr_gp != b.sum_7yr_gp) return "sum_7yr_GP";
  if (a.sum_7yr_toi != b.sum_7yr_toi) return "sum_7yr_TOI";
  if (a.played_flag != b.played_flag) return "GP_greater_than_0";
  return {};
}

}  // namespace

ColumnMap ColumnMap::defaults() {
  ColumnMap map;
  for (const auto& field : required_fields()) map.columns[field] = field;
  return map;
}

const std::vector<std::string>& ColumnMap::required_fields() {
  static const std::vector<std::string> kFields = {
      "id",     "DraftYear", "DraftAge",     "Country", "Position",   "Overall",
      "CSS_rank", "Height",  "Weight",       "rs_GP",   "rs_G",       "rs_A",
      "rs_P",   "rs_PIM",    "rs_PlusMinus", "po_GP",   "po_G",       "po_A",
      "po_P",   "po_PIM",    "po_PlusMinus", "sum_7yr_GP", "sum_7yr_TOI", "GP_greater_than_0"};
  return kFields;
}

std::string ColumnMap::header_for(const std::string& field) const {
  const auto it = columns.find(field);
  return it == columns.end() ? field : it->second;
}

std::vector<RawRow> parse_csv(std::string_view text, const ColumnMap& columns,
                              ValidationReport* report) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

  std::vector<std::pair<std::size_t, std::string_view>> lines;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;
    lines.emplace_back(line_no, line);
  }
  if (lines.empty()) throw SchemaError("empty file: no header row");

  const auto header = split_record(lines.front().second, lines.front().first);
  std::unordered_map<std::string, std::size_t> position_of;
  for (std::size_t i = 0; i < header.size(); ++i) position_of[std::string(trim(header[i]))] = i;

  std::unordered_map<std::string, std::size_t> col;
  for (const auto& field : ColumnMap::required_fields()) {
    const std::string name = columns.header_for(field);
    const auto it = position_of.find(name);
    if (it == position_of.end()) throw SchemaError("missing required column: " + name);
    col[field] = it->second;
  }

  const double height_factor =
      columns.height_unit == LengthUnit::kInches ? kCentimetresPerInch : 1.0;
  const double weight_factor = columns.weight_unit == MassUnit::kPounds ? kKilogramsPerPound : 1.0;

  std::vector<RawRow> rows;
  rows.reserve(lines.size() - 1);
  std::size_t goalies = 0;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto [no, line] = lines[li];
    const auto cells = split_record(line, no);
    if (cells.size() < header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                           std::to_string(cells.size()),
                       no);
    }
    auto cell = [&](const std::string& field) -> std::string_view { return cells[col.at(field)]; };
    auto count = [&](const std::string& field) {
      return is_missing(cell(field)) ? 0.0 : parse_number(cell(field), columns.header_for(field), no);
    };
    auto required = [&](const std::string& field) {
      if (is_missing(cell(field))) {
        throw ParseError("column " + columns.header_for(field) + " is empty", no);
      }
      return cell(field);
    };

    const auto position = parse_position(required("Position"), no);
    if (!position) {
      ++goalies;
      continue;
    }

    RawRow row;
    row.line = no;
    row.id = std::string(trim(required("id")));
    row.draft_year = parse_integer(required("DraftYear"), columns.header_for("DraftYear"), no);
    row.draft_age = parse_number(required("DraftAge"), columns.header_for("DraftAge"), no);
    row.country = std::string(trim(cell("Country")));
    row.position = *position;
    row.overall_pick = parse_integer(required("Overall"), columns.header_for("Overall"), no);
    if (!is_missing(cell("CSS_rank"))) {
      row.css_rank = parse_integer(cell("CSS_rank"), columns.header_for("CSS_rank"), no);
    }
    row.height_cm = count("Height") * height_factor;
    row.weight_kg = count("Weight") * weight_factor;
    row.rs = {count("rs_GP"), count("rs_G"), count("rs_A"),
              count("rs_P"),  count("rs_PIM"), count("rs_PlusMinus")};
    row.po = {count("po_GP"), count("po_G"), count("po_A"),
              count("po_P"),  count("po_PIM"), count("po_PlusMinus")};
    row.sum_7yr_gp = count("sum_7yr_GP");
    row.sum_7yr_toi = count("sum_7yr_TOI");
    row.played_flag =
        parse_flag(cell("GP_greater_than_0"), columns.header_for("GP_greater_than_0"), no);
    rows.push_back(std::move(row));
  }

  if (report) {
    report->rows_read += lines.size() - 1;
    report->goalies_excluded += goalies;
  }
  return rows;
}

std::vector<RawRow> load_csv(const std::filesystem::path& path, const ColumnMap& columns,
                             ValidationReport* report) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), columns, report);
}

std::vector<RawRow> impute_css_rank(std::vector<RawRow> rows, ValidationReport* report) {
  std::map<int, int> max_rank;
  std::set<int> years_needing;
  for (const auto& row : rows) {
    if (row.css_rank) {
      auto [it, inserted] = max_rank.emplace(row.draft_year, *row.css_rank);
      if (!inserted) it->second = std::max(it->second, *row.css_rank);
    } else {
      years_needing.insert(row.draft_year);
    }
  }
  for (const int year : years_needing) {
    if (!max_rank.contains(year)) {
      throw ValidationError("draft year " + std::to_string(year) +
                            " has no CSS-ranked player; cannot impute ranks");
    }
  }
  for (auto& row : rows) {
    if (row.css_rank) continue;
    row.css_rank = max_rank.at(row.draft_year) + 1;
    row.css_imputed = true;
    if (report) report->imputations.push_back({row.id, row.draft_year, *row.css_rank});
  }
  return rows;
}

RawRow pool_countries(RawRow row) {
  const std::string nationality = upper(trim(row.country));
  if (nationality.empty()) {
    throw ValidationError("player " + row.id + " (line " + std::to_string(row.line) +
                          ") has no nationality");
  }
  row.country = (nationality == "CAN" || nationality == "USA") ? nationality : "EURO";
  return row;
}

std::vector<RawRow> pool_countries(std::vector<RawRow> rows, ValidationReport* report) {
  for (auto& row : rows) {
    std::string before = row.country;
    row = pool_countries(std::move(row));
    if (report && before != row.country) {
      report->poolings.push_back({row.id, row.draft_year, std::move(before), row.country});
    }
  }
  return rows;
}

std::vector<RawRow> aggregate_multi_team(std::vector<RawRow> rows, ValidationReport* report) {
  std::vector<RawRow> merged;
  std::vector<std::size_t> entries;
  std::unordered_map<YearKey, std::size_t, YearKeyHash> index;
  merged.reserve(rows.size());
  for (auto& row : rows) {
    YearKey key{row.id, row.draft_year};
    const auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(std::move(key), merged.size());
      merged.push_back(std::move(row));
      entries.push_back(1);
      continue;
    }
    RawRow& into = merged[it->second];
    if (const auto field = first_demographic_conflict(into, row); !field.empty()) {
      throw ValidationError("player " + row.id + " (draft year " + std::to_string(row.draft_year) +
                            "): conflicting " + field + " across team entries");
    }
    add_stats(into.rs, row.rs);
    add_stats(into.po, row.po);
    ++entries[it->second];
  }
  if (report) {
    for (std::size_t i = 0; i < merged.size(); ++i) {
      if (entries[i] > 1) report->merges.push_back({merged[i].id, merged[i].draft_year, entries[i]});
    }
  }
  return merged;
}

void flag_inconsistencies(const std::vector<RawRow>& rows, ValidationReport& report) {
  auto check_points = [&](const RawRow& row, const SeasonStats& s, const char* prefix) {
    if (s.points != s.goals + s.assists) {
      std::ostringstream detail;
      detail << prefix << "_P=" << s.points << " but " << prefix << "_G+" << prefix
             << "_A=" << s.goals + s.assists;
      report.flags.push_back({row.id, row.draft_year, row.line, "points_mismatch", detail.str()});
    }
  };
  for (const auto& row : rows) {
    check_points(row, row.rs, "rs");
    check_points(row, row.po, "po");
    if (row.played_flag != row.played_any()) {
      std::ostringstream detail;
      detail << "GP_greater_than_0=" << row.played_flag << " but sum_7yr_GP=" << row.sum_7yr_gp;
      report.flags.push_back({row.id, row.draft_year, row.line, "played_flag_mismatch",
                              detail.str()});
    }
  }
}

std::vector<RawRow> preprocess(std::vector<RawRow> rows, ValidationReport& report) {
  rows = pool_countries(std::move(rows), &report);
  rows = aggregate_multi_team(std::move(rows), &report);
  rows = impute_css_rank(std::move(rows), &report);
  flag_inconsistencies(rows, report);
  return rows;
}

FeatureSchema::FeatureSchema(std::vector<FeatureDescriptor> features)
    : features_(std::move(features)) {
  std::set<std::string> names;
  for (const auto& f : features_) {
    if (!names.insert(f.name).second) throw SchemaError("duplicate feature name " + f.name);
  }
}

const std::vector<std::string>& FeatureSchema::numeric_sources() {
  static const std::vector<std::string> kSources = {
      "DraftAge", "Height",       "Weight", "Overall", "CSS_rank", "rs_GP", "rs_G",
      "rs_A",     "rs_P",         "rs_PIM", "rs_PlusMinus", "po_GP", "po_G", "po_A",
      "po_P",     "po_PIM",       "po_PlusMinus"};
  return kSources;
}

const std::vector<std::string>& FeatureSchema::country_levels() {
  static const std::vector<std::string> kLevels = {"CAN", "USA", "EURO"};
  return kLevels;
}

const std::vector<std::string>& FeatureSchema::position_levels() {
  static const std::vector<std::string> kLevels = {"L", "R", "C", "D"};
  return kLevels;
}

FeatureSchema FeatureSchema::standard(const std::vector<std::string>& include,
                                      const std::vector<std::string>& exclude) {
  std::set<std::string> known(numeric_sources().begin(), numeric_sources().end());
  known.insert("Country");
  known.insert("Position");
  for (const auto& name : include) {
    if (!known.contains(name)) throw SchemaError("unknown feature source " + name);
  }
  for (const auto& name : exclude) {
    if (!known.contains(name)) throw SchemaError("unknown feature source " + name);
  }
  auto wanted = [&](const std::string& source) {
    if (std::find(exclude.begin(), exclude.end(), source) != exclude.end()) return false;
    if (!include.empty()) return std::find(include.begin(), include.end(), source) != include.end();
    return source != "Overall";
  };

  std::vector<FeatureDescriptor> features;
  for (const auto& source : numeric_sources()) {
    if (wanted(source)) features.push_back({source, FeatureKind::kNumeric, source, ""});
  }
  if (wanted("Country")) {
    for (const auto& level : country_levels()) {
      features.push_back({"Country=" + level, FeatureKind::kOneHot, "Country", level});
    }
  }
  if (wanted("Position")) {
    for (const auto& level : position_levels()) {
      features.push_back({"Position=" + level, FeatureKind::kOneHot, "Position", level});
    }
  }
  if (features.empty()) throw SchemaError("feature selection is empty");
  return FeatureSchema(std::move(features));
}

std::optional<std::size_t> FeatureSchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].name == name) return i;
  }
  return std::nullopt;
}

bool FeatureSchema::uses_source(std::string_view source) const {
  return std::any_of(features_.begin(), features_.end(),
                     [&](const FeatureDescriptor& f) { return f.source == source; });
}

std::vector<double> FeatureSchema::encode(const RawRow& row) const {
  std::vector<double> x;
  x.reserve(features_.size());
  for (const auto& f : features_) {
    if (f.kind == FeatureKind::kNumeric) {
      x.push_back(numeric_value(row, f.source));
      continue;
    }
    const std::string& value = f.source == "Country" ? row.country : row.position;
    const auto& levels = f.source == "Country" ? country_levels() : position_levels();
    if (std::find(levels.begin(), levels.end(), value) == levels.end()) {
      throw ValidationError("player " + row.id + ": " + f.source + " '" + value +
                            "' is not one of the encoded levels");
    }
    x.push_back(value == f.level ? 1.0 : 0.0);
  }
  return x;
}

DecodedLevels FeatureSchema::decode(std::span<const double> x) const {
  if (x.size() != features_.size()) {
    throw SchemaMismatchError("feature vector has " + std::to_string(x.size()) +
                              " entries, schema has " + std::to_string(features_.size()));
  }
  DecodedLevels out;
  for (std::size_t i = 0; i < features_.size(); ++i) {
    const auto& f = features_[i];
    if (f.kind != FeatureKind::kOneHot || x[i] < 0.5) continue;
    auto& slot = f.source == "Country" ? out.country : out.position;
    if (slot) throw ValidationError("more than one " + f.source + " level is set");
    slot = f.level;
  }
  return out;
}

std::string FeatureSchema::hash() const {
  std::string canonical;
  for (const auto& f : features_) {
    canonical += f.name;
    canonical += '\x1f';
    canonical += f.kind == FeatureKind::kNumeric ? "numeric" : "one-hot";
    canonical += '\x1f';
    canonical += f.source;
    canonical += '\x1f';
    canonical += f.level;
    canonical += '\x1e';
  }
  return sha256_hex(canonical);
}

std::set<int> Dataset::years() const {
  std::set<int> out;
  for (const auto& row : rows) out.insert(row.draft_year);
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out{schema, {}};
  out.rows.reserve(indices.size());
  for (const auto i : indices) out.rows.push_back(rows.at(i));
  return out;
}

Dataset encode(const std::vector<RawRow>& rows, const FeatureSchema& schema) {
  Dataset data{schema, {}};
  data.rows.reserve(rows.size());
  std::set<YearKey> seen;
  for (const auto& row : rows) {
    if (!seen.emplace(row.id, row.draft_year).second) {
      throw ValidationError("duplicate player " + row.id + " in draft year " +
                            std::to_string(row.draft_year));
    }
    const auto& levels = FeatureSchema::country_levels();
    if (std::find(levels.begin(), levels.end(), row.country) == levels.end()) {
      throw ValidationError("player " + row.id + ": nationality '" + row.country +
                            "' has not been pooled");
    }
    Example ex;
    ex.id = row.id;
    ex.draft_year = row.draft_year;
    ex.x = schema.encode(row);
    ex.label = row.played_any() ? 1 : 0;
    ex.sum_7yr_gp = row.sum_7yr_gp;
    ex.sum_7yr_toi = row.sum_7yr_toi;
    ex.overall_pick = row.overall_pick;
    ex.country = row.country;
    ex.position = row.position;
    data.rows.push_back(std::move(ex));
  }
  return data;
}

Dataset select_years(const Dataset& data, const std::set<int>& years) {
  Dataset out{data.schema, {}};
  for (const auto& row : data.rows) {
    if (years.contains(row.draft_year)) out.rows.push_back(row);
  }
  return out;
}

YearSplit split_by_years(const Dataset& data, const std::set<int>& train_years,
                         const std::set<int>& test_years) {
  for (const int year : train_years) {
    if (test_years.contains(year)) {
      throw ValidationError("draft year " + std::to_string(year) +
                            " is in both the training and the test years");
    }
  }
  YearSplit split{select_years(data, train_years), select_years(data, test_years), {}};
  const auto present = data.years();
  for (const int year : train_years) {
    if (!present.contains(year)) {
      split.warnings.push_back("training year " + std::to_string(year) + " has no rows");
    }
  }
  for (const int year : test_years) {
    if (!present.contains(year)) {
      split.warnings.push_back("test year " + std::to_string(year) + " has no rows");
    }
  }
  return split;
}

Eigen::MatrixXd design_matrix(const Dataset& data) {
  const auto n = static_cast<Eigen::Index>(data.size());
  const auto d = static_cast<Eigen::Index>(data.schema.width());
  Eigen::MatrixXd X(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) X(i, j) = data.rows[i].x[j];
  }
  return X;
}

Eigen::MatrixXd design_matrix(const Dataset& data, std::span<const std::size_t> rows) {
  const auto d = static_cast<Eigen::Index>(data.schema.width());
  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& x = data.rows[rows[i]].x;
    for (Eigen::Index j = 0; j < d; ++j) X(static_cast<Eigen::Index>(i), j) = x[j];
  }
  return X;
}

Eigen::VectorXd label_vector(const Dataset& data) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) y[static_cast<Eigen::Index>(i)] = data.rows[i].label;
  return y;
}

Eigen::VectorXd label_vector(const Dataset& data, std::span<const std::size_t> rows) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    y[static_cast<Eigen::Index>(i)] = data.rows[rows[i]].label;
  }
  return y;
}

std::string to_string(LengthUnit unit) { return unit == LengthUnit::kInches ? "in" : "cm"; }
std::string to_string(MassUnit unit) { return unit == MassUnit::kPounds ? "lb" : "kg"; }

LengthUnit parse_length_unit(std::string_view text) {
  if (text == "cm") return LengthUnit::kCentimetres;
  if (text == "in") return LengthUnit::kInches;
  throw SchemaError("unknown height unit '" + std::string(text) + "' (expected cm or in)");
}

MassUnit parse_mass_unit(std::string_view text) {
  if (text == "kg") return MassUnit::kKilograms;
  if (text == "lb") return MassUnit::kPounds;
  throw SchemaError("unknown weight unit '" + std::string(text) + "' (expected kg or lb)");
}

}  // namespace draftlmt
