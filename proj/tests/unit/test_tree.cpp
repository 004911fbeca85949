#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "readmit/error.hpp"
#include "readmit/models.hpp"

using namespace readmit;

namespace {

struct Data {
  Matrix x;
  std::vector<int> y;
};

Data make_data(std::size_t n, std::size_t p, int levels, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> value(0, levels - 1);
  std::uniform_int_distribution<int> label(0, 2);
  Data d{Matrix(n, p), std::vector<int>(n)};
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < p; ++j) d.x(r, j) = value(gen);
    d.y[r] = label(gen);
  }
  return d;
}

double gini(const std::vector<std::size_t>& rows, const std::vector<int>& y) {
  if (rows.empty()) return 0;
  std::array<double, 3> c{};
  for (auto r : rows) c[static_cast<std::size_t>(y[r])] += 1;
  double g = 1;
  for (double v : c) g -= (v / rows.size()) * (v / rows.size());
  return g;
}

double weighted_gini(const std::vector<std::size_t>& l, const std::vector<std::size_t>& r, const std::vector<int>& y) {
  double n = static_cast<double>(l.size() + r.size());
  return (l.size() * gini(l, y) + r.size() * gini(r, y)) / n;
}

// Exhaustive search over every feature and every cut between node-local
// distinct values.
std::optional<double> oracle_best(const Data& d, const std::vector<std::size_t>& rows, std::size_t min_leaf) {
  std::optional<double> best;
  for (std::size_t f = 0; f < d.x.cols(); ++f) {
    std::set<double> values;
    for (auto r : rows) values.insert(d.x(r, f));
    for (double cut : values) {
      if (cut == *values.rbegin()) break;
      std::vector<std::size_t> l, rr;
      for (auto r : rows) (d.x(r, f) <= cut ? l : rr).push_back(r);
      if (l.size() < min_leaf || rr.size() < min_leaf) continue;
      double g = weighted_gini(l, rr, d.y);
      if (!best || g < *best) best = g;
    }
  }
  return best;
}

struct Walk {
  std::size_t node;
  std::vector<std::size_t> rows;
  std::size_t depth;
};

std::vector<Walk> walk(const DecisionTree& t, const Data& d, const std::vector<std::size_t>& rows) {
  std::vector<Walk> out;
  std::vector<Walk> stack{{0, rows, 0}};
  while (!stack.empty()) {
    Walk w = stack.back();
    stack.pop_back();
    out.push_back(w);
    const TreeNode& n = t.nodes[w.node];
    if (n.feature < 0) continue;
    Walk l{static_cast<std::size_t>(n.left), {}, w.depth + 1};
    Walk r{static_cast<std::size_t>(n.right), {}, w.depth + 1};
    for (auto row : w.rows) (d.x(row, static_cast<std::size_t>(n.feature)) <= n.threshold ? l : r).rows.push_back(row);
    stack.push_back(l);
    stack.push_back(r);
  }
  return out;
}

DecisionTree grow(const Data& d, const TreeParams& params, std::uint64_t seed = 1) {
  SortedColumns cols(d.x);
  std::vector<std::size_t> samples(d.x.rows());
  std::iota(samples.begin(), samples.end(), 0);
  Rng rng(seed);
  return grow_classification_tree(cols, d.y, samples, params, rng);
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

}  // namespace

TEST_CASE("every split is the exhaustive Gini optimum") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const std::size_t n = 8 + seed % 23;
    Data d = make_data(n, 3, 4, seed);
    const std::size_t min_leaf = 1 + seed % 3;
    DecisionTree t = grow(d, {std::nullopt, 2, min_leaf, std::nullopt});

    for (const Walk& w : walk(t, d, all_rows(n))) {
      const TreeNode& node = t.nodes[w.node];
      REQUIRE_FALSE(w.rows.empty());
      auto best = oracle_best(d, w.rows, min_leaf);
      if (node.feature < 0) {
        bool pure = gini(w.rows, d.y) == 0;
        CHECK((pure || !best.has_value() || w.rows.size() < 2));
        continue;
      }
      REQUIRE(best.has_value());
      std::vector<std::size_t> lr, rr;
      for (auto row : w.rows) (d.x(row, static_cast<std::size_t>(node.feature)) <= node.threshold ? lr : rr).push_back(row);
      CHECK(lr.size() >= min_leaf);
      CHECK(rr.size() >= min_leaf);
      CHECK(weighted_gini(lr, rr, d.y) == doctest::Approx(*best).epsilon(1e-12));
      CHECK(weighted_gini(lr, rr, d.y) <= gini(w.rows, d.y) + 1e-12);
    }
  }
}

TEST_CASE("thresholds are midpoints between observed values") {
  Data d{Matrix(4, 1), {0, 0, 1, 1}};
  d.x(0, 0) = 1, d.x(1, 0) = 2, d.x(2, 0) = 4, d.x(3, 0) = 8;
  DecisionTree t = grow(d, {});
  REQUIRE(t.nodes.size() == 3);
  CHECK(t.nodes[0].feature == 0);
  CHECK(t.nodes[0].threshold == 3.0);
  CHECK(t.nodes[1].value == 0);
  CHECK(t.nodes[2].value == 1);
}

TEST_CASE("unrestricted trees memorize distinct rows") {
  Data d = make_data(120, 5, 1000, 77);
  DecisionTree t = grow(d, {});
  for (std::size_t r = 0; r < d.x.rows(); ++r) CHECK(t.value(d.x.row(r)) == d.y[r]);
}

TEST_CASE("depth and leaf limits hold") {
  Data d = make_data(200, 4, 50, 3);
  for (std::size_t depth : {1u, 2u, 4u}) CHECK(grow(d, {depth, 2, 1, std::nullopt}).depth() <= depth);
  DecisionTree t = grow(d, {std::nullopt, 2, 7, std::nullopt});
  for (const Walk& w : walk(t, d, all_rows(200)))
    if (t.nodes[w.node].feature < 0) CHECK(w.rows.size() >= 7);
  DecisionTree s = grow(d, {std::nullopt, 40, 1, std::nullopt});
  for (const Walk& w : walk(s, d, all_rows(200)))
    if (s.nodes[w.node].feature >= 0) CHECK(w.rows.size() >= 40);
}

TEST_CASE("leaf values are the majority class, ties to the lower index") {
  Data d{Matrix(3, 1, 0.0), {2, 1, 2}};
  CHECK(grow(d, {}).value(d.x.row(0)) == 2);
  Data tie{Matrix(4, 1, 0.0), {2, 1, 1, 2}};
  CHECK(grow(tie, {}).value(tie.x.row(0)) == 1);
}

TEST_CASE("feature subsampling is seeded") {
  Data d = make_data(150, 9, 20, 5);
  TreeParams p{std::nullopt, 2, 1, 3};
  auto a = grow(d, p, 10);
  auto b = grow(d, p, 10);
  REQUIRE(a.nodes.size() == b.nodes.size());
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    CHECK(a.nodes[i].feature == b.nodes[i].feature);
    CHECK(a.nodes[i].threshold == b.nodes[i].threshold);
  }
  CHECK(auto_max_features(79) == 8);
  CHECK(auto_max_features(1) == 1);
  CHECK(auto_max_features(0) == 1);
}

TEST_CASE("regression trees reduce squared error") {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(0, 1);
  Matrix x(60, 2);
  std::vector<double> target(60);
  for (std::size_t r = 0; r < 60; ++r) {
    x(r, 0) = u(gen);
    x(r, 1) = u(gen);
    target[r] = x(r, 0) > 0.5 ? 3.0 : -1.0;
  }
  SortedColumns cols(x);
  Rng rng(1);
  auto rows = all_rows(60);
  DecisionTree t = grow_regression_tree(cols, target, rows, {1, 2, 1, std::nullopt}, rng);
  CHECK(t.nodes[0].feature == 0);
  for (std::size_t r = 0; r < 60; ++r) CHECK(t.value(x.row(r)) == doctest::Approx(target[r]));
}

TEST_CASE("invalid tree parameters") {
  Data d = make_data(10, 2, 3, 1);
  CHECK_THROWS_AS(grow(d, {std::nullopt, 1, 1, std::nullopt}), DomainError);
  CHECK_THROWS_AS(grow(d, {std::nullopt, 2, 0, std::nullopt}), DomainError);
  CHECK_THROWS_AS(grow(d, {std::nullopt, 2, 1, 0}), DomainError);
  SortedColumns cols(d.x);
  Rng rng(1);
  CHECK_THROWS_AS(grow_classification_tree(cols, d.y, {}, {}, rng), DomainError);
}
