#include "readmit/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "readmit/csv.hpp"
#include "readmit/error.hpp"

namespace readmit {

int class_index(std::string_view label) {
  for (std::size_t k = 0; k < kClassCount; ++k)
    if (kClassNames[k] == label) return static_cast<int>(k);
  throw DomainError("unknown readmission label '" + std::string(label) + "'");
}

std::string_view to_string(DiagnosisGroup g) {
  switch (g) {
    case DiagnosisGroup::diabetes: return "diabetes";
    case DiagnosisGroup::circulatory: return "circulatory";
    case DiagnosisGroup::respiratory: return "respiratory";
    case DiagnosisGroup::digestive: return "digestive";
    case DiagnosisGroup::genitourinary: return "genitourinary";
    case DiagnosisGroup::injury: return "injury";
    case DiagnosisGroup::musculoskeletal: return "musculoskeletal";
    case DiagnosisGroup::neoplasms: return "neoplasms";
    case DiagnosisGroup::other: return "other";
  }
  return "other";
}

DiagnosisGroup group_icd9(std::string_view code) {
  std::string text = csv::trim(code);
  if (text.empty()) throw DomainError("empty ICD-9 code");
  std::string_view prefix = std::string_view(text).substr(0, text.find('.'));
  int value = 0;
  auto [ptr, ec] = std::from_chars(prefix.data(), prefix.data() + prefix.size(), value);
  if (ec != std::errc() || ptr != prefix.data() + prefix.size()) return DiagnosisGroup::other;

  auto in = [value](int lo, int hi) { return value >= lo && value <= hi; };
  if (in(250, 251)) return DiagnosisGroup::diabetes;
  if (in(390, 458) || value == 785) return DiagnosisGroup::circulatory;
  if (in(460, 519) || value == 786) return DiagnosisGroup::respiratory;
  if (in(520, 579) || value == 787) return DiagnosisGroup::digestive;
  if (in(580, 629) || value == 788) return DiagnosisGroup::genitourinary;
  if (in(800, 999)) return DiagnosisGroup::injury;
  if (in(710, 739)) return DiagnosisGroup::musculoskeletal;
  if (in(140, 239)) return DiagnosisGroup::neoplasms;
  return DiagnosisGroup::other;
}

double encode_age(std::string_view range_text) {
  auto bad = [&] { return DomainError("unrecognized age range '" + std::string(range_text) + "'"); };
  if (range_text.size() < 5 || range_text.front() != '[' || range_text.back() != ')') throw bad();
  auto body = range_text.substr(1, range_text.size() - 2);
  auto dash = body.find('-');
  if (dash == std::string_view::npos) throw bad();
  int lo = 0;
  int hi = 0;
  auto r1 = std::from_chars(body.data(), body.data() + dash, lo);
  auto r2 = std::from_chars(body.data() + dash + 1, body.data() + body.size(), hi);
  if (r1.ec != std::errc() || r1.ptr != body.data() + dash || r2.ec != std::errc() ||
      r2.ptr != body.data() + body.size() || lo < 0 || hi != lo + 10 || lo % 10 != 0 || hi > 100)
    throw bad();
  return (lo + hi) / 2.0;
}

namespace {

const std::map<std::string, double>& glucose_map() {
  static const std::map<std::string, double> m = {{"None", 0}, {"Norm", 100}, {">200", 200}, {">300", 300}};
  return m;
}

const std::map<std::string, double>& a1c_map() {
  static const std::map<std::string, double> m = {{"None", 0}, {"Norm", 5}, {">7", 7}, {">8", 8}};
  return m;
}

const std::map<std::string, double>& medication_map() {
  static const std::map<std::string, double> m = {{"Up", 1}, {"Down", -1}, {"Steady", 0}, {"No", -2}};
  return m;
}

}  // namespace

double encode_ordinal_tests(std::string_view value, LabTest test) {
  const auto& m = test == LabTest::glucose ? glucose_map() : a1c_map();
  auto it = m.find(std::string(value));
  if (it == m.end())
    throw DomainError(fmt::format("value '{}' outside the {} test domain", value,
                                  test == LabTest::glucose ? "max_glu_serum" : "A1Cresult"));
  return it->second;
}

const std::vector<std::string>& medication_columns() {
  static const std::vector<std::string> cols = {
      "metformin",           "repaglinide",         "nateglinide",          "chlorpropamide",
      "glimepiride",         "acetohexamide",       "glipizide",            "glyburide",
      "tolbutamide",         "pioglitazone",        "rosiglitazone",        "acarbose",
      "miglitol",            "troglitazone",        "tolazamide",           "examide",
      "citoglipton",         "glyburide-metformin", "glipizide-metformin",  "glimepiride-pioglitazone",
      "metformin-rosiglitazone", "metformin-pioglitazone"};
  return cols;
}

std::string_view rule_name(const Rule& r) {
  struct Visitor {
    std::string_view operator()(const rule::OneHot&) const { return "one_hot"; }
    std::string_view operator()(const rule::Binary&) const { return "binary"; }
    std::string_view operator()(const rule::Ordinal&) const { return "ordinal"; }
    std::string_view operator()(const rule::IntervalMedian&) const { return "interval_median"; }
    std::string_view operator()(const rule::Icd9Group&) const { return "icd9_group_then_one_hot"; }
    std::string_view operator()(const rule::Passthrough&) const { return "passthrough_numeric"; }
    std::string_view operator()(const rule::Drop&) const { return "drop"; }
  };
  return std::visit(Visitor{}, r);
}

const FeatureRule* EncodingPlan::find(std::string_view column) const {
  for (const auto& r : rules)
    if (r.column == column) return &r;
  return nullptr;
}

const IdGroups& default_id_groups() {
  // Derived from the IDS_mapping descriptions: "home" covers plain home
  // discharge, home health, home IV and hospice at home; "transfer" covers
  // every "Discharged/transferred" destination and hospice/medical facility.
  static const IdGroups groups = {
      {1},
      {{"home", {1, 6, 8, 13}},
       {"transfer", {2, 3, 4, 5, 10, 14, 15, 16, 17, 22, 23, 24, 27, 28, 29, 30}}},
      {{"emergency_room", {7}}, {"transfer", {4, 5, 6, 10, 18, 22, 25, 26}}},
  };
  return groups;
}

namespace {

rule::OneHot grouped_one_hot(const std::map<std::string, std::set<int>>& groups,
                             const std::vector<std::string>& order) {
  rule::OneHot r;
  r.categories = order;
  r.fallback = "other";
  for (const auto& [name, ids] : groups)
    for (int id : ids) r.grouping.emplace(std::to_string(id), name);
  return r;
}

}  // namespace

EncodingPlan default_plan(bool include_23_meds) {
  const IdGroups& ids = default_id_groups();
  EncodingPlan plan;
  plan.include_23_meds = include_23_meds;
  auto add = [&](std::string column, Rule r) { plan.rules.push_back({std::move(column), std::move(r)}); };

  for (const auto& c : cleaned_away_columns()) add(c, rule::Drop{});
  add("race", rule::OneHot{});
  add("gender", rule::Binary{{"Male"}, {"Female"}});
  add("age", rule::IntervalMedian{});

  rule::Binary emergency;
  for (int id : ids.emergency_admission_types) emergency.positive.insert(std::to_string(id));
  add("admission_type_id", emergency);
  add("discharge_disposition_id", grouped_one_hot(ids.discharge, {"home", "transfer", "other"}));
  add("admission_source_id", grouped_one_hot(ids.source, {"emergency_room", "transfer", "other"}));

  for (const char* c : {"time_in_hospital", "num_lab_procedures", "num_procedures", "num_medications",
                        "number_outpatient", "number_emergency", "number_inpatient"})
    add(c, rule::Passthrough{});
  for (const char* c : {"diag_1", "diag_2", "diag_3"}) add(c, rule::Icd9Group{});
  add("number_diagnoses", rule::Passthrough{});

  add("max_glu_serum", rule::Ordinal{glucose_map()});
  add("A1Cresult", rule::Ordinal{a1c_map()});
  for (const auto& c : medication_columns()) {
    if (include_23_meds)
      add(c, rule::Ordinal{medication_map()});
    else
      add(c, rule::Drop{});
  }
  add("insulin", rule::OneHot{});
  add("change", rule::Binary{{"Ch"}, {"No"}});
  add("diabetesMed", rule::Binary{{"Yes"}, {"No"}});
  return plan;
}

// --- FeatureMatrix -------------------------------------------------------------

std::array<std::size_t, kClassCount> FeatureMatrix::class_counts() const {
  std::array<std::size_t, kClassCount> counts{};
  for (int y : labels) ++counts.at(static_cast<std::size_t>(y));
  return counts;
}

FeatureMatrix FeatureMatrix::select(std::span<const std::size_t> rows) const {
  FeatureMatrix out;
  out.feature_names = feature_names;
  out.blocks = blocks;
  out.x = x.select_rows(rows);
  out.labels.reserve(rows.size());
  for (std::size_t r : rows) out.labels.push_back(labels.at(r));
  return out;
}

namespace {

std::string source_of(const std::string& feature_name) { return feature_name.substr(0, feature_name.find('=')); }

}  // namespace

FeatureMatrix FeatureMatrix::drop_sources(std::span<const std::string> sources) const {
  std::vector<std::size_t> dropped;
  FeatureMatrix out;
  for (std::size_t c = 0; c < feature_names.size(); ++c) {
    if (std::find(sources.begin(), sources.end(), source_of(feature_names[c])) != sources.end())
      dropped.push_back(c);
    else
      out.feature_names.push_back(feature_names[c]);
  }
  out.x = x.drop_columns(dropped);
  out.labels = labels;
  for (const auto& b : blocks) {
    if (std::find(sources.begin(), sources.end(), b.source) != sources.end()) continue;
    OneHotBlock nb = b;
    nb.first -= static_cast<std::size_t>(std::count_if(dropped.begin(), dropped.end(),
                                                       [&](std::size_t d) { return d < b.first; }));
    out.blocks.push_back(std::move(nb));
  }
  return out;
}

namespace {

const std::string& require_value(const Column& col, std::size_t row) {
  const Cell& c = col.values[row];
  if (!c) throw DomainError(fmt::format("feature '{}' has a missing value at row {}", col.name, row));
  return *c;
}

double parse_number(const Column& col, std::size_t row) {
  const std::string& s = require_value(col, row);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw DomainError(fmt::format("feature '{}' has non-numeric value '{}' at row {}", col.name, s, row));
  return v;
}

std::string one_hot_category(const rule::OneHot& r, const std::string& value) {
  if (r.grouping.empty()) return value;
  auto it = r.grouping.find(value);
  return it == r.grouping.end() ? r.fallback : it->second;
}

// Column layout of one source feature within the matrix.
struct Slot {
  const Column* column;
  const Rule* rule;
  std::size_t first;
  std::vector<std::string> categories;  // one-hot / icd9 only
};

}  // namespace

FeatureMatrix build_matrix(const RawTable& table, const EncodingPlan& plan) {
  const Column& label_col = table.column(kLabelColumn);

  for (const auto& r : plan.rules)
    if (!std::holds_alternative<rule::Drop>(r.rule) && !table.find(r.column))
      throw SchemaError("plan rule for column '" + r.column + "' but the table has no such column");

  FeatureMatrix out;
  std::vector<Slot> slots;
  std::size_t width = 0;
  for (const auto& col : table.columns()) {
    if (col.name == kLabelColumn) continue;
    const FeatureRule* fr = plan.find(col.name);
    if (!fr) throw SchemaError("no encoding rule for column '" + col.name + "'");
    if (std::holds_alternative<rule::Drop>(fr->rule)) continue;

    Slot slot{&col, &fr->rule, width, {}};
    if (const auto* oh = std::get_if<rule::OneHot>(&fr->rule)) {
      if (!oh->categories.empty()) {
        slot.categories = oh->categories;
      } else {
        for (std::size_t row = 0; row < table.n_rows(); ++row) {
          std::string cat = one_hot_category(*oh, require_value(col, row));
          if (std::find(slot.categories.begin(), slot.categories.end(), cat) == slot.categories.end())
            slot.categories.push_back(std::move(cat));
        }
      }
    } else if (std::holds_alternative<rule::Icd9Group>(fr->rule)) {
      for (std::size_t g = 0; g < kDiagnosisGroupCount; ++g)
        slot.categories.emplace_back(to_string(static_cast<DiagnosisGroup>(g)));
    }

    if (slot.categories.empty()) {
      out.feature_names.push_back(col.name);
      width += 1;
    } else {
      for (const auto& c : slot.categories) out.feature_names.push_back(col.name + "=" + c);
      out.blocks.push_back({col.name, slot.first, slot.categories});
      width += slot.categories.size();
    }
    slots.push_back(std::move(slot));
  }

  out.x = Matrix(table.n_rows(), width);
  out.labels.reserve(table.n_rows());
  for (std::size_t row = 0; row < table.n_rows(); ++row) {
    out.labels.push_back(class_index(require_value(label_col, row)));
    auto dest = out.x.row(row);
    for (const Slot& s : slots) {
      const Column& col = *s.column;
      std::visit(
          [&](const auto& r) {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, rule::OneHot>) {
              std::string cat = one_hot_category(r, require_value(col, row));
              auto it = std::find(s.categories.begin(), s.categories.end(), cat);
              if (it == s.categories.end())
                throw DomainError(fmt::format("feature '{}': category '{}' not in plan", col.name, cat));
              dest[s.first + static_cast<std::size_t>(it - s.categories.begin())] = 1.0;
            } else if constexpr (std::is_same_v<R, rule::Binary>) {
              const std::string& v = require_value(col, row);
              bool pos = r.positive.count(v) > 0;
              if (!pos && !r.negative.empty() && r.negative.count(v) == 0)
                throw DomainError(fmt::format("feature '{}': value '{}' is neither positive nor negative", col.name, v));
              dest[s.first] = pos ? 1.0 : 0.0;
            } else if constexpr (std::is_same_v<R, rule::Ordinal>) {
              const std::string& v = require_value(col, row);
              auto it = r.mapping.find(v);
              if (it == r.mapping.end())
                throw DomainError(fmt::format("feature '{}': value '{}' absent from ordinal map", col.name, v));
              dest[s.first] = it->second;
            } else if constexpr (std::is_same_v<R, rule::IntervalMedian>) {
              dest[s.first] = encode_age(require_value(col, row));
            } else if constexpr (std::is_same_v<R, rule::Icd9Group>) {
              dest[s.first + static_cast<std::size_t>(group_icd9(require_value(col, row)))] = 1.0;
            } else if constexpr (std::is_same_v<R, rule::Passthrough>) {
              dest[s.first] = parse_number(col, row);
            }
          },
          *s.rule);
    }
  }
  return out;
}

nlohmann::json encoding_manifest(const EncodingPlan& plan, const FeatureMatrix& m, const IdMappings* ids) {
  nlohmann::json rules = nlohmann::json::array();
  for (const auto& r : plan.rules) {
    nlohmann::json j = {{"column", r.column}, {"rule", rule_name(r.rule)}};
    if (const auto* ord = std::get_if<rule::Ordinal>(&r.rule)) j["mapping"] = ord->mapping;
    if (const auto* bin = std::get_if<rule::Binary>(&r.rule)) j["positive"] = bin->positive;
    rules.push_back(std::move(j));
  }
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : m.blocks)
    blocks.push_back({{"source", b.source}, {"first_column", b.first}, {"categories", b.categories}});

  const IdGroups& groups = default_id_groups();
  auto describe_groups = [&](IdKind kind, const std::map<std::string, std::set<int>>& g) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [name, set] : g) {
      nlohmann::json members = nlohmann::json::array();
      for (int id : set) {
        nlohmann::json e = {{"id", id}};
        if (ids) e["description"] = ids->describe(kind, id);
        members.push_back(std::move(e));
      }
      j[name] = std::move(members);
    }
    j["other"] = "every id not listed above";
    return j;
  };
  nlohmann::json emergency = nlohmann::json::array();
  for (int id : groups.emergency_admission_types) {
    nlohmann::json e = {{"id", id}};
    if (ids) e["description"] = ids->describe(IdKind::admission_type, id);
    emergency.push_back(std::move(e));
  }

  return {
      {"include_23_meds", plan.include_23_meds},
      {"medication_columns", medication_columns()},
      {"feature_count", m.width()},
      {"feature_names", m.feature_names},
      {"rules", std::move(rules)},
      {"one_hot_blocks", std::move(blocks)},
      {"id_groups",
       {{"admission_type_emergency", std::move(emergency)},
        {"discharge_disposition", describe_groups(IdKind::discharge_disposition, groups.discharge)},
        {"admission_source", describe_groups(IdKind::admission_source, groups.source)}}},
  };
}

// --- CSV ------------------------------------------------------------------------

void write_matrix_csv(const FeatureMatrix& m, std::ostream& out, std::span<const std::string> provenance) {
  if (!provenance.empty() && provenance.size() != m.n_rows())
    throw DomainError("provenance length does not match row count");
  std::vector<std::string> header = m.feature_names;
  if (!provenance.empty()) header.emplace_back("provenance");
  header.emplace_back("label");
  csv::write_row(out, header);

  fmt::memory_buffer buf;
  for (std::size_t r = 0; r < m.n_rows(); ++r) {
    buf.clear();
    auto row = m.x.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) buf.push_back(',');
      fmt::format_to(std::back_inserter(buf), "{}", row[c]);
    }
    if (!provenance.empty()) fmt::format_to(std::back_inserter(buf), ",{}", provenance[r]);
    fmt::format_to(std::back_inserter(buf), ",{}\n", m.labels[r]);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
}

MatrixCsv read_matrix_csv(std::istream& in) {
  csv::Reader reader(in);
  std::vector<std::string> header;
  if (!reader.next(header) || header.empty() || header.back() != "label")
    throw ParseError("matrix CSV must have a header ending in 'label'");

  MatrixCsv out;
  bool has_provenance = header.size() >= 2 && header[header.size() - 2] == "provenance";
  std::size_t width = header.size() - (has_provenance ? 2 : 1);
  out.matrix.feature_names.assign(header.begin(), header.begin() + static_cast<std::ptrdiff_t>(width));

  for (std::size_t c = 0; c < width; ++c) {
    const std::string& name = out.matrix.feature_names[c];
    auto eq = name.find('=');
    if (eq == std::string::npos) continue;
    std::string src = name.substr(0, eq);
    auto& blocks = out.matrix.blocks;
    if (blocks.empty() || blocks.back().source != src || blocks.back().first + blocks.back().width() != c)
      blocks.push_back({src, c, {}});
    blocks.back().categories.push_back(name.substr(eq + 1));
  }

  std::vector<std::string> fields;
  std::vector<double> values(width);
  std::size_t row = 0;
  out.matrix.x = Matrix(0, width);
  while (reader.next(fields)) {
    if (fields.size() != header.size())
      throw ParseError(fmt::format("matrix row {} has {} fields, header has {}", row, fields.size(), header.size()),
                       row);
    for (std::size_t c = 0; c < width; ++c) {
      const std::string& f = fields[c];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), values[c]);
      if (ec != std::errc() || ptr != f.data() + f.size())
        throw ParseError(fmt::format("matrix row {}: bad number '{}' in column {}", row, f, header[c]), row);
    }
    out.matrix.x.append_row(values);
    int label = -1;
    const std::string& lf = fields.back();
    auto [ptr, ec] = std::from_chars(lf.data(), lf.data() + lf.size(), label);
    if (ec != std::errc() || ptr != lf.data() + lf.size() || label < 0 || label >= static_cast<int>(kClassCount))
      throw ParseError(fmt::format("matrix row {}: bad label '{}'", row, lf), row);
    out.matrix.labels.push_back(label);
    if (has_provenance) out.provenance.push_back(fields[width]);
    ++row;
  }
  return out;
}

MatrixCsv load_matrix_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return read_matrix_csv(in);
}

}  // namespace readmit
