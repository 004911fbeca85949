#include "readmit/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

#include "readmit/csv.hpp"
#include "readmit/error.hpp"

namespace readmit {

RawTable::RawTable(std::vector<Column> columns) : columns_(std::move(columns)) {
  if (!columns_.empty()) n_rows_ = columns_.front().values.size();
  for (const auto& col : columns_) {
    if (col.values.size() != n_rows_)
      throw DomainError("column '" + col.name + "' has " + std::to_string(col.values.size()) +
                        " rows, expected " + std::to_string(n_rows_));
  }
}

std::optional<std::size_t> RawTable::find(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i].name == name) return i;
  return std::nullopt;
}

const Column& RawTable::column(std::string_view name) const {
  auto idx = find(name);
  if (!idx) throw SchemaError("column '" + std::string(name) + "' not found");
  return columns_[*idx];
}

std::vector<std::string> RawTable::column_names() const {
  std::vector<std::string> names;
  names.reserve(columns_.size());
  for (const auto& c : columns_) names.push_back(c.name);
  return names;
}

RawTable parse_raw(std::istream& in) {
  csv::Reader reader(in);
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw ParseError("empty file: no header row");

  std::vector<Column> columns(fields.size());
  for (std::size_t i = 0; i < fields.size(); ++i) columns[i].name = fields[i];

  std::size_t row = 0;
  while (reader.next(fields)) {
    if (fields.size() != columns.size())
      throw ParseError("row " + std::to_string(row) + " (line " + std::to_string(reader.line()) + ") has " +
                           std::to_string(fields.size()) + " fields, header has " + std::to_string(columns.size()),
                       row);
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (fields[i] == kMissingMarker)
        columns[i].values.emplace_back(std::nullopt);
      else
        columns[i].values.emplace_back(std::move(fields[i]));
    }
    ++row;
  }
  return RawTable(std::move(columns));
}

RawTable load_raw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  return parse_raw(in);
}

void write_raw(const RawTable& table, std::ostream& out) {
  auto names = table.column_names();
  csv::write_row(out, names);
  std::vector<std::string> fields(table.n_cols());
  for (std::size_t r = 0; r < table.n_rows(); ++r) {
    for (std::size_t c = 0; c < table.n_cols(); ++c) {
      const Cell& cell = table.column(c).values[r];
      fields[c] = cell ? *cell : std::string(kMissingMarker);
    }
    csv::write_row(out, fields);
  }
}

void save_raw(const RawTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  write_raw(table, out);
}

// --- ID mappings ------------------------------------------------------------

std::string_view to_string(IdKind kind) {
  switch (kind) {
    case IdKind::admission_type: return "admission_type_id";
    case IdKind::discharge_disposition: return "discharge_disposition_id";
    case IdKind::admission_source: return "admission_source_id";
  }
  return "?";
}

const std::map<int, std::string>& IdMappings::section(IdKind kind) const {
  switch (kind) {
    case IdKind::admission_type: return admission_type;
    case IdKind::discharge_disposition: return discharge_disposition;
    case IdKind::admission_source: return admission_source;
  }
  throw DomainError("unknown IdKind");
}

std::string IdMappings::describe(IdKind kind, int id) const {
  const auto& m = section(kind);
  auto it = m.find(id);
  return it == m.end() ? std::string(kNotMapped) : it->second;
}

namespace {

bool blank_record(const std::vector<std::string>& fields) {
  return std::all_of(fields.begin(), fields.end(), [](const std::string& f) { return csv::trim(f).empty(); });
}

std::optional<IdKind> section_kind(std::string_view header) {
  for (IdKind k : {IdKind::admission_type, IdKind::discharge_disposition, IdKind::admission_source})
    if (header == to_string(k)) return k;
  return std::nullopt;
}

std::map<int, std::string>& mutable_section(IdMappings& m, IdKind kind) {
  switch (kind) {
    case IdKind::admission_type: return m.admission_type;
    case IdKind::discharge_disposition: return m.discharge_disposition;
    case IdKind::admission_source: return m.admission_source;
  }
  throw DomainError("unknown IdKind");
}

}  // namespace

IdMappings parse_id_mappings(std::istream& in) {
  IdMappings out;
  csv::Reader reader(in);
  std::vector<std::string> fields;
  std::map<int, std::string>* current = nullptr;
  std::string current_name;
  bool seen[3] = {false, false, false};
  bool expect_header = true;

  while (reader.next(fields)) {
    if (blank_record(fields)) {
      expect_header = true;
      continue;
    }
    std::string first = csv::trim(fields[0]);
    if (expect_header) {
      auto kind = section_kind(first);
      std::string second = fields.size() > 1 ? csv::trim(fields[1]) : "";
      if (!kind || second != "description")
        throw ParseError("malformed section header '" + first + "' on line " + std::to_string(reader.line()));
      auto idx = static_cast<std::size_t>(*kind);
      if (seen[idx]) throw ParseError("section '" + first + "' appears twice");
      seen[idx] = true;
      current = &mutable_section(out, *kind);
      current_name = first;
      expect_header = false;
      continue;
    }
    int id = 0;
    auto [ptr, ec] = std::from_chars(first.data(), first.data() + first.size(), id);
    if (ec != std::errc() || ptr != first.data() + first.size() || id <= 0)
      throw ParseError("section '" + current_name + "': invalid id '" + first + "' on line " +
                       std::to_string(reader.line()));
    std::string desc = fields.size() > 1 ? csv::trim(fields[1]) : "";
    if (!current->emplace(id, desc).second)
      throw ParseError("section '" + current_name + "': duplicate id " + std::to_string(id));
  }

  for (IdKind k : {IdKind::admission_type, IdKind::discharge_disposition, IdKind::admission_source})
    if (!seen[static_cast<std::size_t>(k)])
      throw SchemaError("ID mapping file lacks section '" + std::string(to_string(k)) + "'");
  return out;
}

IdMappings load_id_mappings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  return parse_id_mappings(in);
}

// --- Missing profile ----------------------------------------------------------

MissingProfile missing_profile(const RawTable& table) {
  MissingProfile profile;
  profile.reserve(table.n_cols());
  for (const auto& col : table.columns()) {
    auto n = static_cast<std::size_t>(
        std::count_if(col.values.begin(), col.values.end(), [](const Cell& c) { return !c.has_value(); }));
    double frac = table.n_rows() == 0 ? 0.0 : static_cast<double>(n) / static_cast<double>(table.n_rows());
    profile.push_back({col.name, n, frac});
  }
  return profile;
}

void write_missing_profile(const MissingProfile& profile, std::ostream& out) {
  out << "feature,fraction\n";
  out.precision(17);
  for (const auto& e : profile) out << csv::escape(e.feature) << ',' << e.fraction << '\n';
}

// --- Cleaning ---------------------------------------------------------------

const std::vector<std::string>& cleaned_away_columns() {
  static const std::vector<std::string> cols = {"weight", "payer_code", "medical_specialty", "encounter_id",
                                                "patient_nbr"};
  return cols;
}

const std::vector<std::string>& required_value_columns() {
  static const std::vector<std::string> cols = {"race", "gender", "diag_1", "diag_2", "diag_3"};
  return cols;
}

namespace {

constexpr std::string_view kLabelColumn = "readmitted";

struct RowRule {
  std::string name;
  const Column* column;
  bool unknown_invalid;  // false: missing-value rule

  bool fails(std::size_t row) const {
    const Cell& c = column->values[row];
    return unknown_invalid ? (c && *c == kUnknownInvalid) : !c.has_value();
  }
};

}  // namespace

CleanResult clean_with_log(const RawTable& table) {
  std::vector<RowRule> rules;
  for (const auto& name : required_value_columns()) rules.push_back({"missing:" + name, &table.column(name), false});
  for (std::string_view name : {"race", "gender"})
    rules.push_back({"unknown_invalid:" + std::string(name), &table.column(name), true});

  CleanLog log;
  log.rows_in = table.n_rows();
  for (const auto& r : rules) log.rules.push_back({r.name, 0, 0});

  std::vector<std::size_t> kept;
  kept.reserve(table.n_rows());
  for (std::size_t row = 0; row < table.n_rows(); ++row) {
    bool drop = false;
    for (std::size_t i = 0; i < rules.size(); ++i) {
      if (!rules[i].fails(row)) continue;
      ++log.rules[i].marginal;
      if (!drop) ++log.rules[i].attributed;
      drop = true;
    }
    if (!drop) kept.push_back(row);
  }

  const auto& drop_names = cleaned_away_columns();
  std::vector<Column> columns;
  for (const auto& col : table.columns()) {
    if (std::find(drop_names.begin(), drop_names.end(), col.name) != drop_names.end()) {
      log.dropped_columns.push_back(col.name);
      continue;
    }
    Column out{col.name, {}};
    out.values.reserve(kept.size());
    for (std::size_t row : kept) out.values.push_back(col.values[row]);
    columns.push_back(std::move(out));
  }
  RawTable cleaned(std::move(columns));
  log.rows_out = cleaned.n_rows();

  if (auto idx = cleaned.find(kLabelColumn)) {
    for (const Cell& c : cleaned.column(*idx).values) {
      std::string label = c ? *c : std::string(kMissingMarker);
      auto it = std::find_if(log.class_counts.begin(), log.class_counts.end(),
                             [&](const auto& p) { return p.first == label; });
      if (it == log.class_counts.end())
        log.class_counts.emplace_back(label, 1);
      else
        ++it->second;
    }
  }
  return {std::move(cleaned), std::move(log)};
}

RawTable clean(const RawTable& table) { return clean_with_log(table).table; }

}  // namespace readmit
