#include <doctest.h>

#include <algorithm>
#include <bit>
#include <random>
#include <sstream>

#include "readmit/error.hpp"
#include "readmit/pipeline.hpp"
#include "readmit/stats.hpp"
#include "synthetic.hpp"

using namespace readmit;

namespace {

// 2 * P[X <= min(k, n - k)] by counting all 2^n outcomes.
double enumerated_p(std::size_t k, std::size_t n) {
  const std::size_t m = std::min(k, n - k);
  std::uint64_t hits = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask)
    hits += static_cast<std::size_t>(std::popcount(mask)) <= m;
  return std::min(1.0, 2.0 * static_cast<double>(hits) / static_cast<double>(std::uint64_t{1} << n));
}

ScoreColumns score_columns(const std::string& metric) {
  for (auto& c : load_score_table(testing::fixture_path("gb_rf_fold_scores.csv")))
    if (c.metric == metric) return c;
  FAIL("no metric " << metric);
  return {};
}

std::vector<ScoredConfig> scored(const std::vector<double>& v) {
  std::vector<ScoredConfig> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back({v[i], {{"i", static_cast<int>(i)}}});
  return out;
}

}  // namespace

TEST_CASE("binomial tail matches enumeration") {
  for (std::size_t n = 1; n <= 20; ++n)
    for (std::size_t k = 0; k <= n; ++k) {
      CAPTURE(n);
      CAPTURE(k);
      CHECK(binomial_two_sided(k, n) == doctest::Approx(enumerated_p(k, n)).epsilon(1e-14));
    }
  CHECK(binomial_two_sided(0, 10) == 0.001953125);
  CHECK(binomial_two_sided(5, 10) == 1.0);
  CHECK(binomial_two_sided(2, 10) == doctest::Approx(0.109375));
  CHECK(binomial_two_sided(1, 10) == doctest::Approx(0.021484375));
  CHECK(binomial_two_sided(0, 0) == 1.0);
}

TEST_CASE("large n stays close to the exact tail") {
  // n = 60: 2 * P[X <= 20] by summing exact integer binomials in long double.
  long double c = 1, sum = 0;
  for (int i = 0; i <= 20; ++i) {
    sum += c;
    c = c * (60 - i) / (i + 1);
  }
  double exact = static_cast<double>(2 * sum / std::ldexp(1.0L, 60));
  CHECK(binomial_two_sided(20, 60) == doctest::Approx(exact).epsilon(1e-9));
}

TEST_CASE("sign test counts and decisions") {
  SUBCASE("identical vectors tie everywhere") {
    std::vector<double> a{1, 2, 3};
    SignTestResult r = sign_test(a, a);
    CHECK(r.ties == 3);
    CHECK(r.n_effective == 0);
    CHECK(r.p_value == 1.0);
    CHECK(r.decision == Decision::fail_to_reject);
  }
  SUBCASE("ten straight wins") {
    std::vector<double> a(10, 2.0), b(10, 1.0);
    SignTestResult r = sign_test(a, b);
    CHECK(r.wins_a == 10);
    CHECK(r.p_value == 0.001953125);
    CHECK(r.decision == Decision::reject_null);
    SignTestResult t = sign_test(a, b, 0.05, &reported_critical_values());
    REQUIRE(t.critical_value);
    CHECK(*t.critical_value == 8);
    CHECK(t.critical_decision == Decision::reject_null);
  }
  SUBCASE("antisymmetry") {
    std::mt19937_64 gen(5);
    std::uniform_int_distribution<int> d(0, 4);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> a(12), b(12);
      for (std::size_t i = 0; i < 12; ++i) a[i] = d(gen), b[i] = d(gen);
      SignTestResult ab = sign_test(a, b);
      SignTestResult ba = sign_test(b, a);
      CHECK(ab.wins_a == ba.wins_b);
      CHECK(ab.ties == ba.ties);
      CHECK(ab.p_value == ba.p_value);
      CHECK(ab.wins_a + ab.wins_b + ab.ties == 12);
    }
  }
  SUBCASE("shifting both vectors by a constant changes nothing") {
    std::vector<double> a{0.5, 0.25, 1.0, 0.75, 0.125}, b{0.25, 0.25, 0.5, 1.0, 0.375};
    std::vector<double> as = a, bs = b;
    for (auto& v : as) v += 8.0;
    for (auto& v : bs) v += 8.0;
    SignTestResult x = sign_test(a, b);
    SignTestResult y = sign_test(as, bs);
    CHECK(x.wins_a == y.wins_a);
    CHECK(x.ties == y.ties);
  }
  SUBCASE("errors") {
    std::vector<double> a{1, 2}, b{1};
    CHECK_THROWS_AS(sign_test(a, b), DomainError);
    CHECK_THROWS_AS(sign_test(std::vector<double>{}, std::vector<double>{}), DomainError);
    CHECK_THROWS_AS(sign_test(a, a, 0.0), DomainError);
    CHECK_THROWS_AS(sign_test(a, a, 1.0), DomainError);
  }
  CHECK(to_string(Decision::reject_null) == "reject_null");
}

TEST_CASE("GB vs RF per-fold scores do not separate the two models") {
  ScoreColumns acc = score_columns("accuracy");
  SignTestResult r = sign_test(acc.a, acc.b, 0.05, &reported_critical_values());
  CHECK(r.wins_a == 5);
  CHECK(r.wins_b == 5);
  CHECK(r.ties == 0);
  CHECK(r.p_value == 1.0);
  CHECK(r.decision == Decision::fail_to_reject);
  CHECK(r.critical_decision == Decision::fail_to_reject);

  ScoreColumns prec = score_columns("precision");
  SignTestResult p = sign_test(prec.a, prec.b);
  CHECK(p.wins_a == 0);
  CHECK(p.wins_b == 9);
  CHECK(p.ties == 1);
  CHECK(p.p_value == doctest::Approx(0.00390625));
  CHECK(p.decision == Decision::reject_null);
}

TEST_CASE("quantiles interpolate linearly") {
  std::vector<double> v{1, 2, 3, 4};
  CHECK(quantile(v, 0.0) == 1);
  CHECK(quantile(v, 1.0) == 4);
  CHECK(quantile(v, 0.5) == 2.5);
  CHECK(quantile(v, 0.25) == 1.75);
  std::vector<double> one{7};
  CHECK(quantile(one, 0.3) == 7);
}

TEST_CASE("boxplot worked examples") {
  auto a = boxplot_summary(scored({1, 2, 3, 4, 5, 6, 7, 8, 9}));
  CHECK(a.q1 == 3);
  CHECK(a.median == 5);
  CHECK(a.q3 == 7);
  CHECK(a.iqr == 4);
  CHECK(a.lower_fence == -3);
  CHECK(a.upper_fence == 13);
  CHECK(a.outliers.empty());

  auto b = boxplot_summary(scored({1, 2, 3, 4, 100}));
  CHECK(b.q1 == 2);
  CHECK(b.q3 == 4);
  CHECK(b.upper_fence == 7);
  REQUIRE(b.outliers.size() == 1);
  CHECK(b.outliers[0].score == 100);

  auto c = boxplot_summary(scored({5, 5, 5, 5, 5}));
  CHECK(c.iqr == 0);
  CHECK(c.outliers.empty());

  // A value exactly on the fence is not an outlier.
  auto d = boxplot_summary(scored({1, 2, 3, 4, 7}));
  CHECK(d.outliers.empty());

  CHECK_THROWS_AS(boxplot_summary(scored({1, 2, 3})), DomainError);
}

TEST_CASE("boxplot is permutation invariant and outliers are exactly those beyond the fences") {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> d(0.64, 0.01);
  std::vector<double> v(60);
  for (auto& x : v) x = d(gen);
  v[3] = 0.55;
  v[17] = 0.58;
  auto base = boxplot_summary(scored(v));
  std::vector<ScoredConfig> sc = scored(v);
  std::shuffle(sc.begin(), sc.end(), gen);
  auto shuffled = boxplot_summary(sc);
  CHECK(shuffled.q1 == base.q1);
  CHECK(shuffled.q3 == base.q3);
  CHECK(shuffled.outliers.size() == base.outliers.size());

  std::size_t expected = 0;
  for (double x : v) expected += x < base.lower_fence || x > base.upper_fence;
  CHECK(base.outliers.size() == expected);
  CHECK(std::is_sorted(base.outliers.begin(), base.outliers.end(),
                       [](const ScoredConfig& a, const ScoredConfig& b) { return a.score < b.score; }));
}

TEST_CASE("outlier attribution over reported configurations") {
  std::vector<ScoredConfig> configs = {
      {60.33, {{"learning_rate", 1}, {"max_depth", 6}, {"n_estimators", 150}}},
      {60.30, {{"learning_rate", 0.1}, {"max_depth", 1}, {"n_estimators", 150}}},
      {58.48, {{"learning_rate", 0.1}, {"max_depth", 1}, {"n_estimators", 100}}},
      {55.08, {{"learning_rate", 0.1}, {"max_depth", 1}, {"n_estimators", 50}}},
  };
  for (int i = 0; i < 30; ++i)
    configs.push_back({64.0 + 0.05 * (i % 10), {{"learning_rate", 0.5}, {"max_depth", 3 + i % 4}, {"n_estimators", 100}}});
  BoxplotSummary s = boxplot_summary(configs);
  REQUIRE(s.outliers.size() == 4);
  CHECK(s.outliers.front().score == 55.08);
  AttributionTable t = outlier_attribution(s);
  CHECK(t.at("learning_rate").at("0.1") == 3);
  CHECK(t.at("learning_rate").at("1") == 1);
  CHECK(t.at("max_depth").at("1") == 3);
  CHECK(t.at("n_estimators").at("150") == 2);

  std::ostringstream out;
  write_boxplot_csv(configs, s, out);
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "score,rank,params,is_outlier");
  std::size_t rows = 0, flagged = 0;
  while (std::getline(lines, line)) {
    ++rows;
    flagged += line.substr(line.size() - 1) == "1";
  }
  CHECK(rows == configs.size());
  CHECK(flagged == 4);
  CHECK(to_json(s).at("outliers").size() == 4);
}
