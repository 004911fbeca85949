#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace readmit {

// A parsed CSV cell. The literal "?" is the dataset's only missing marker and
// is stored as nullopt; every other text (including "") is kept verbatim.
using Cell = std::optional<std::string>;

inline constexpr std::string_view kMissingMarker = "?";

struct Column {
  std::string name;
  std::vector<Cell> values;
};

// Column-oriented table of text cells. Immutable once built; all columns have
// the same length.
class RawTable {
 public:
  RawTable() = default;
  explicit RawTable(std::vector<Column> columns);

  std::size_t n_rows() const noexcept { return n_rows_; }
  std::size_t n_cols() const noexcept { return columns_.size(); }
  const std::vector<Column>& columns() const noexcept { return columns_; }
  const Column& column(std::size_t i) const { return columns_.at(i); }

  std::optional<std::size_t> find(std::string_view name) const;
  // Throws SchemaError naming the column when absent.
  const Column& column(std::string_view name) const;
  std::vector<std::string> column_names() const;

 private:
  std::vector<Column> columns_;
  std::size_t n_rows_ = 0;
};

RawTable parse_raw(std::istream& in);
RawTable load_raw(const std::filesystem::path& path);

// Inverse of parse_raw up to CSV quoting: missing cells are written as "?".
void write_raw(const RawTable& table, std::ostream& out);
void save_raw(const RawTable& table, const std::filesystem::path& path);

// --- ID mapping file -------------------------------------------------------

enum class IdKind { admission_type, discharge_disposition, admission_source };

std::string_view to_string(IdKind kind);

inline constexpr std::string_view kNotMapped = "not mapped";

struct IdMappings {
  std::map<int, std::string> admission_type;
  std::map<int, std::string> discharge_disposition;
  std::map<int, std::string> admission_source;

  const std::map<int, std::string>& section(IdKind kind) const;
  // Description for an id, or kNotMapped when the file has no entry for it.
  std::string describe(IdKind kind, int id) const;
};

IdMappings parse_id_mappings(std::istream& in);
IdMappings load_id_mappings(const std::filesystem::path& path);

// --- Missing values --------------------------------------------------------

struct MissingEntry {
  std::string feature;
  std::size_t count = 0;
  double fraction = 0.0;
};

using MissingProfile = std::vector<MissingEntry>;

MissingProfile missing_profile(const RawTable& table);
void write_missing_profile(const MissingProfile& profile, std::ostream& out);

// --- Cleaning --------------------------------------------------------------

inline constexpr std::string_view kUnknownInvalid = "Unknown/Invalid";

// Columns removed by clean(): three sparse ones and two random identifiers.
const std::vector<std::string>& cleaned_away_columns();
// Columns whose missing cells cause a row drop.
const std::vector<std::string>& required_value_columns();

struct RuleDropCount {
  std::string rule;        // e.g. "missing:race", "unknown_invalid:gender"
  std::size_t marginal;    // rows failing this rule (ignoring the others)
  std::size_t attributed;  // rows whose first failing rule is this one
};

struct CleanLog {
  std::size_t rows_in = 0;
  std::size_t rows_out = 0;
  std::vector<std::string> dropped_columns;
  std::vector<RuleDropCount> rules;
  // Post-clean histogram of the readmitted column, in first-observed order.
  std::vector<std::pair<std::string, std::size_t>> class_counts;
};

struct CleanResult {
  RawTable table;
  CleanLog log;
};

// Drops the sparse/identifier columns (when present) and every row with a
// missing race, gender or diagnosis, or an "Unknown/Invalid" race or gender.
// Row order is preserved. Idempotent.
CleanResult clean_with_log(const RawTable& table);
RawTable clean(const RawTable& table);

}  // namespace readmit
