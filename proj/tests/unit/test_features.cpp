#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "readmit/error.hpp"
#include "readmit/features.hpp"
#include "synthetic.hpp"

using namespace readmit;

namespace {

RawTable cleaned_synthetic(std::size_t rows = 400, std::uint64_t seed = 11) {
  std::istringstream in(testing::synthetic_extract({rows, seed, 0.03}));
  return clean(parse_raw(in));
}

RawTable replace_cell(const RawTable& t, const std::string& column, std::size_t row, Cell value) {
  std::vector<Column> cols = t.columns();
  for (auto& c : cols)
    if (c.name == column) c.values[row] = std::move(value);
  return RawTable(std::move(cols));
}

std::size_t index_of(const FeatureMatrix& m, const std::string& name) {
  auto it = std::find(m.feature_names.begin(), m.feature_names.end(), name);
  REQUIRE(it != m.feature_names.end());
  return static_cast<std::size_t>(it - m.feature_names.begin());
}

}  // namespace

TEST_CASE("icd9 grouping") {
  CHECK(group_icd9("250.83") == DiagnosisGroup::diabetes);
  CHECK(group_icd9("251") == DiagnosisGroup::diabetes);
  CHECK(group_icd9("401") == DiagnosisGroup::circulatory);
  CHECK(group_icd9("785") == DiagnosisGroup::circulatory);
  CHECK(group_icd9("786") == DiagnosisGroup::respiratory);
  CHECK(group_icd9("519.9") == DiagnosisGroup::respiratory);
  CHECK(group_icd9("787") == DiagnosisGroup::digestive);
  CHECK(group_icd9("788") == DiagnosisGroup::genitourinary);
  CHECK(group_icd9("629") == DiagnosisGroup::genitourinary);
  CHECK(group_icd9("800") == DiagnosisGroup::injury);
  CHECK(group_icd9("999") == DiagnosisGroup::injury);
  CHECK(group_icd9("715") == DiagnosisGroup::musculoskeletal);
  CHECK(group_icd9("140") == DiagnosisGroup::neoplasms);
  CHECK(group_icd9("239") == DiagnosisGroup::neoplasms);
  CHECK(group_icd9("V57") == DiagnosisGroup::other);
  CHECK(group_icd9("E888") == DiagnosisGroup::other);
  CHECK(group_icd9("252") == DiagnosisGroup::other);
  CHECK(group_icd9("784") == DiagnosisGroup::other);
  CHECK_THROWS_AS(group_icd9(""), DomainError);
}

TEST_CASE("age ranges map to their midpoints") {
  CHECK(encode_age("[0-10)") == 5);
  CHECK(encode_age("[10-20)") == 15);
  CHECK(encode_age("[90-100)") == 95);
  CHECK_THROWS_AS(encode_age("[5-15)"), DomainError);
  CHECK_THROWS_AS(encode_age("[90-110)"), DomainError);
  CHECK_THROWS_AS(encode_age("70-80"), DomainError);
  CHECK_THROWS_AS(encode_age("[70-80]"), DomainError);
}

TEST_CASE("lab tests are ordinal") {
  CHECK(encode_ordinal_tests(">300", LabTest::glucose) == 300);
  CHECK(encode_ordinal_tests(">200", LabTest::glucose) == 200);
  CHECK(encode_ordinal_tests("Norm", LabTest::glucose) == 100);
  CHECK(encode_ordinal_tests("None", LabTest::glucose) == 0);
  CHECK(encode_ordinal_tests("Norm", LabTest::a1c) == 5);
  CHECK(encode_ordinal_tests(">7", LabTest::a1c) == 7);
  CHECK(encode_ordinal_tests(">8", LabTest::a1c) == 8);
  CHECK(encode_ordinal_tests("None", LabTest::a1c) == 0);
  CHECK_THROWS_AS(encode_ordinal_tests(">8", LabTest::glucose), DomainError);
  CHECK_THROWS_AS(encode_ordinal_tests("High", LabTest::a1c), DomainError);
}

TEST_CASE("labels") {
  CHECK(class_index("NO") == 0);
  CHECK(class_index(">30") == 1);
  CHECK(class_index("<30") == 2);
  CHECK_THROWS_AS(class_index("YES"), DomainError);
}

TEST_CASE("default plan") {
  EncodingPlan with = default_plan(true);
  EncodingPlan without = default_plan(false);
  const auto& meds = medication_columns();
  CHECK(meds.size() == 22);
  CHECK(std::find(meds.begin(), meds.end(), "metformin") != meds.end());
  CHECK(std::find(meds.begin(), meds.end(), "insulin") == meds.end());

  for (const auto& med : meds) {
    REQUIRE(with.find(med));
    CHECK(rule_name(with.find(med)->rule) == "ordinal");
    CHECK(std::get<rule::Ordinal>(with.find(med)->rule).mapping ==
          std::map<std::string, double>{{"Up", 1}, {"Down", -1}, {"Steady", 0}, {"No", -2}});
    CHECK(rule_name(without.find(med)->rule) == "drop");
  }

  std::set<std::string> columns;
  for (const auto& r : with.rules) CHECK(columns.insert(r.column).second);
  CHECK(rule_name(with.find("insulin")->rule) == "one_hot");
  CHECK(rule_name(with.find("gender")->rule) == "binary");
  CHECK(rule_name(with.find("age")->rule) == "interval_median");
  CHECK(rule_name(with.find("diag_2")->rule) == "icd9_group_then_one_hot");
  CHECK(rule_name(with.find("encounter_id")->rule) == "drop");
}

TEST_CASE("matrix layout on the extract schema") {
  RawTable t = cleaned_synthetic();
  FeatureMatrix with = build_matrix(t, default_plan(true));
  FeatureMatrix without = build_matrix(t, default_plan(false));

  CHECK(with.width() == 79);
  CHECK(without.width() == 57);
  CHECK(with.width() - without.width() == medication_columns().size());
  CHECK(with.feature_names.size() == with.width());
  CHECK(with.n_rows() == t.n_rows());

  SUBCASE("one-hot blocks sum to one") {
    for (const auto& b : with.blocks)
      for (std::size_t r = 0; r < with.n_rows(); ++r) {
        double s = 0;
        for (std::size_t j = 0; j < b.width(); ++j) s += with.x(r, b.first + j);
        CHECK(s == 1.0);
      }
  }

  SUBCASE("toggle leaves the other columns bit-identical") {
    for (std::size_t j = 0; j < without.width(); ++j) {
      std::size_t k = index_of(with, without.feature_names[j]);
      for (std::size_t r = 0; r < with.n_rows(); ++r) REQUIRE(with.x(r, k) == without.x(r, j));
    }
  }

  SUBCASE("dropping the medication sources equals the exclude plan") {
    FeatureMatrix dropped = with.drop_sources(medication_columns());
    CHECK(dropped.feature_names == without.feature_names);
    CHECK(dropped.x == without.x);
    CHECK(dropped.labels == without.labels);
    CHECK(dropped.blocks.size() == without.blocks.size());
  }

  SUBCASE("fixed category orders") {
    CHECK(index_of(with, "discharge_disposition_id=home") + 1 == index_of(with, "discharge_disposition_id=transfer"));
    CHECK(index_of(with, "admission_source_id=emergency_room") + 2 == index_of(with, "admission_source_id=other"));
    CHECK(index_of(with, "diag_1=diabetes") + 8 == index_of(with, "diag_1=other"));
  }

  SUBCASE("labels follow the declared mapping") {
    const auto& col = t.column("readmitted");
    for (std::size_t r = 0; r < t.n_rows(); ++r) CHECK(with.labels[r] == class_index(*col.values[r]));
  }

  SUBCASE("deterministic") {
    FeatureMatrix again = build_matrix(t, default_plan(true));
    CHECK(again.x == with.x);
    CHECK(again.feature_names == with.feature_names);
  }

  SUBCASE("finite everywhere") {
    for (double v : with.x.data()) REQUIRE(std::isfinite(v));
  }
}

TEST_CASE("specific encodings") {
  RawTable t = cleaned_synthetic(200, 4);
  FeatureMatrix m = build_matrix(t, default_plan(true));
  for (std::size_t r = 0; r < t.n_rows(); ++r) {
    CHECK(m.x(r, index_of(m, "gender")) == (*t.column("gender").values[r] == "Male" ? 1.0 : 0.0));
    CHECK(m.x(r, index_of(m, "admission_type_id")) == (*t.column("admission_type_id").values[r] == "1" ? 1.0 : 0.0));
    CHECK(m.x(r, index_of(m, "age")) == encode_age(*t.column("age").values[r]));
    auto group = group_icd9(*t.column("diag_3").values[r]);
    CHECK(m.x(r, index_of(m, "diag_3=" + std::string(to_string(group)))) == 1.0);
    CHECK(m.x(r, index_of(m, "num_medications")) == std::stod(*t.column("num_medications").values[r]));
  }
}

TEST_CASE("out-of-domain values name the feature and value") {
  RawTable t = cleaned_synthetic(50, 8);
  try {
    build_matrix(replace_cell(t, "A1Cresult", 3, Cell(">9")), default_plan(true));
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    std::string what = e.what();
    CHECK(what.find("A1Cresult") != std::string::npos);
    CHECK(what.find(">9") != std::string::npos);
  }
  CHECK_THROWS_AS(build_matrix(replace_cell(t, "metformin", 0, Cell("Sometimes")), default_plan(true)), DomainError);
  CHECK_NOTHROW(build_matrix(replace_cell(t, "metformin", 0, Cell("Sometimes")), default_plan(false)));
  CHECK_THROWS_AS(build_matrix(replace_cell(t, "time_in_hospital", 0, std::nullopt), default_plan(true)), DomainError);
  CHECK_THROWS_AS(build_matrix(replace_cell(t, "readmitted", 0, Cell("YES")), default_plan(true)), DomainError);
}

TEST_CASE("unplanned columns are schema errors") {
  std::vector<Column> cols = cleaned_synthetic(20, 2).columns();
  cols.push_back({"mystery", std::vector<Cell>(cols.front().values.size(), Cell("1"))});
  CHECK_THROWS_AS(build_matrix(RawTable(cols), default_plan(true)), SchemaError);
}

TEST_CASE("matrix csv round trip") {
  FeatureMatrix m = build_matrix(cleaned_synthetic(120, 9), default_plan(true));
  m.x(0, 0) = 0.1 + 0.2;
  std::vector<std::string> prov(m.n_rows(), "original");
  prov.back() = "synthetic";

  std::stringstream buf;
  write_matrix_csv(m, buf, prov);
  MatrixCsv back = read_matrix_csv(buf);
  CHECK(back.matrix.feature_names == m.feature_names);
  CHECK(back.matrix.x == m.x);
  CHECK(back.matrix.labels == m.labels);
  CHECK(back.provenance == prov);
  REQUIRE(back.matrix.blocks.size() == m.blocks.size());
  for (std::size_t i = 0; i < m.blocks.size(); ++i) {
    CHECK(back.matrix.blocks[i].source == m.blocks[i].source);
    CHECK(back.matrix.blocks[i].first == m.blocks[i].first);
    CHECK(back.matrix.blocks[i].categories == m.blocks[i].categories);
  }

  std::stringstream plain;
  write_matrix_csv(m, plain);
  std::string header;
  std::getline(plain, header);
  CHECK(header.substr(header.size() - 6) == ",label");
}

TEST_CASE("encoding manifest records the realized width") {
  RawTable t = cleaned_synthetic(60, 6);
  FeatureMatrix m = build_matrix(t, default_plan(true));
  IdMappings ids = load_id_mappings(testing::fixture_path("IDS_mapping.csv"));
  nlohmann::json j = encoding_manifest(default_plan(true), m, &ids);
  CHECK(j.at("feature_count") == 79);
  CHECK(j.at("feature_names").size() == 79);
  CHECK(j.at("medication_columns").size() == 22);
}
