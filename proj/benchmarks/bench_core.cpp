#include <benchmark/benchmark.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "readmit/balance.hpp"
#include "readmit/learners.hpp"
#include "readmit/models.hpp"
#include "readmit/stats.hpp"

using namespace readmit;

namespace {

FeatureMatrix random_features(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> level(0, 9);
  std::discrete_distribution<int> label({0.55, 0.33, 0.12});
  FeatureMatrix m;
  m.x = Matrix(rows, cols);
  for (std::size_t c = 0; c < cols; ++c) m.feature_names.push_back("f" + std::to_string(c));
  for (std::size_t r = 0; r < rows; ++r) {
    m.labels.push_back(label(gen));
    for (std::size_t c = 0; c < cols; ++c) m.x(r, c) = level(gen);
  }
  return m;
}

void BM_TreeFit(benchmark::State& state) {
  FeatureMatrix m = random_features(static_cast<std::size_t>(state.range(0)), 79, 1);
  for (auto _ : state) {
    auto model = fit({Family::decision_tree, {}, 1}, m.x, m.labels);
    benchmark::DoNotOptimize(model);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TreeFit)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_NearestNeighbors(benchmark::State& state) {
  FeatureMatrix m = random_features(static_cast<std::size_t>(state.range(0)), 79, 2);
  std::vector<std::size_t> members(m.n_rows());
  std::iota(members.begin(), members.end(), 0);
  for (auto _ : state) benchmark::DoNotOptimize(nearest_neighbors(m.x, members, 5));
}
BENCHMARK(BM_NearestNeighbors)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_Smote(benchmark::State& state) {
  FeatureMatrix m = random_features(static_cast<std::size_t>(state.range(0)), 79, 3);
  auto counts = m.class_counts();
  std::size_t target = *std::max_element(counts.begin(), counts.end());
  for (auto _ : state) benchmark::DoNotOptimize(smote(m, {.seed = 1, .k_neighbors = 5, .target_per_class = target}));
}
BENCHMARK(BM_Smote)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_SignTest(benchmark::State& state) {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> d(0.6, 0.02);
  std::vector<double> a(static_cast<std::size_t>(state.range(0))), b(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = d(gen), b[i] = d(gen);
  for (auto _ : state) benchmark::DoNotOptimize(sign_test(a, b));
}
BENCHMARK(BM_SignTest)->Arg(10)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
