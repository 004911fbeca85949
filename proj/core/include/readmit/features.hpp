#pragma once

#include <array>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "readmit/ingest.hpp"
#include "readmit/matrix.hpp"

namespace readmit {

// Readmission classes: 0 = "NO", 1 = ">30", 2 = "<30".
inline constexpr std::size_t kClassCount = 3;
inline constexpr std::array<std::string_view, kClassCount> kClassNames = {"NO", ">30", "<30"};
inline constexpr std::string_view kLabelColumn = "readmitted";

// Label text to class index; throws DomainError for anything else.
int class_index(std::string_view label);

enum class DiagnosisGroup {
  diabetes,
  circulatory,
  respiratory,
  digestive,
  genitourinary,
  injury,
  musculoskeletal,
  neoplasms,
  other,
};

inline constexpr std::size_t kDiagnosisGroupCount = 9;

std::string_view to_string(DiagnosisGroup g);

// Groups an ICD-9 code by the integer part before the first '.'. Codes with
// an alphabetic prefix (V, E) and unlisted ranges map to `other`.
DiagnosisGroup group_icd9(std::string_view code);

// "[a-b)" -> (a + b) / 2.
double encode_age(std::string_view range_text);

enum class LabTest { glucose, a1c };

double encode_ordinal_tests(std::string_view value, LabTest test);

// The 22 non-insulin drug columns, included or dropped together.
const std::vector<std::string>& medication_columns();

// --- Encoding plan -----------------------------------------------------------

namespace rule {

// One indicator column per category. With `grouping`, raw values are first
// mapped to a category (unmatched values go to `fallback`). An empty
// `categories` list means first-observed order in the table.
struct OneHot {
  std::vector<std::string> categories;
  std::map<std::string, std::string> grouping;
  std::string fallback;
};

// Single 0/1 column: 1 when the value is in `positive`. A non-empty
// `negative` set makes the domain closed (other values are errors).
struct Binary {
  std::set<std::string> positive;
  std::set<std::string> negative;
};

struct Ordinal {
  std::map<std::string, double> mapping;
};

struct IntervalMedian {};
struct Icd9Group {};
struct Passthrough {};
struct Drop {};

}  // namespace rule

using Rule = std::variant<rule::OneHot, rule::Binary, rule::Ordinal, rule::IntervalMedian, rule::Icd9Group,
                          rule::Passthrough, rule::Drop>;

std::string_view rule_name(const Rule& r);

struct FeatureRule {
  std::string column;
  Rule rule;
};

struct EncodingPlan {
  std::vector<FeatureRule> rules;
  bool include_23_meds = true;

  const FeatureRule* find(std::string_view column) const;
};

// Id sets behind the grouped nominal encodings.
struct IdGroups {
  std::set<int> emergency_admission_types;
  std::map<std::string, std::set<int>> discharge;  // home, transfer (rest: other)
  std::map<std::string, std::set<int>> source;     // emergency_room, transfer (rest: other)
};

const IdGroups& default_id_groups();

EncodingPlan default_plan(bool include_23_meds);

// --- Feature matrix ------------------------------------------------------------

struct OneHotBlock {
  std::string source;
  std::size_t first = 0;
  std::vector<std::string> categories;

  std::size_t width() const noexcept { return categories.size(); }
};

struct FeatureMatrix {
  std::vector<std::string> feature_names;
  Matrix x;
  std::vector<int> labels;
  std::vector<OneHotBlock> blocks;

  std::size_t n_rows() const noexcept { return x.rows(); }
  std::size_t width() const noexcept { return x.cols(); }
  std::array<std::size_t, kClassCount> class_counts() const;

  FeatureMatrix select(std::span<const std::size_t> rows) const;
  // Removes the named source features (and any one-hot block built from them).
  FeatureMatrix drop_sources(std::span<const std::string> sources) const;
};

FeatureMatrix build_matrix(const RawTable& table, const EncodingPlan& plan);

// Plan description, realized width and category orders.
nlohmann::json encoding_manifest(const EncodingPlan& plan, const FeatureMatrix& m, const IdMappings* ids = nullptr);

// Header = feature names (+ "provenance" when given) + "label".
void write_matrix_csv(const FeatureMatrix& m, std::ostream& out,
                      std::span<const std::string> provenance = {});

struct MatrixCsv {
  FeatureMatrix matrix;
  std::vector<std::string> provenance;  // empty when the file has no provenance column
};

// Reads a file produced by write_matrix_csv. One-hot blocks are recovered
// from "source=category" column names.
MatrixCsv read_matrix_csv(std::istream& in);
MatrixCsv load_matrix_csv(const std::string& path);

}  // namespace readmit
