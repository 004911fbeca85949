#include "readmit/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "readmit/error.hpp"
#include "readmit/parallel.hpp"

namespace readmit {

double svm_objective(const Matrix& x, std::span<const double> signs, std::span<const double> w, double bias,
                     double c) {
  double reg = 0;
  for (double v : w) reg += v * v;
  double hinge = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto row = x.row(i);
    double s = bias;
    for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * row[j];
    hinge += std::max(0.0, 1.0 - signs[i] * s);
  }
  return 0.5 * reg + c * hinge;
}

namespace {

struct BinaryFit {
  std::vector<double> w;
  double bias = 0;
  std::vector<double> trace;
};

BinaryFit fit_binary(const Matrix& x, std::span<const double> signs, const SvmParams& params, Rng& rng) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  BinaryFit fit;
  fit.w.assign(p, 0.0);

  double max_sq = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 1.0;
    for (double v : x.row(i)) s += v * v;
    max_sq = std::max(max_sq, s);
  }
  double step = 1.0 / (params.c * max_sq);
  const double shrink_per_sample = 1.0 / static_cast<double>(n);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  double objective = svm_objective(x, signs, fit.w, fit.bias, params.c);
  fit.trace.push_back(objective);

  std::vector<double> w(p);
  for (std::size_t epoch = 0; epoch < params.max_epochs; ++epoch) {
    w = fit.w;
    double b = fit.bias;
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t i : order) {
      auto row = x.row(i);
      double s = b;
      for (std::size_t j = 0; j < p; ++j) s += w[j] * row[j];
      double decay = 1.0 - step * shrink_per_sample;
      for (double& v : w) v *= decay;
      if (signs[i] * s < 1.0) {
        double g = step * params.c * signs[i];
        for (std::size_t j = 0; j < p; ++j) w[j] += g * row[j];
        b += g;
      }
    }
    double candidate = svm_objective(x, signs, w, b, params.c);
    if (candidate <= objective) {
      fit.w = w;
      fit.bias = b;
      objective = candidate;
    } else {
      step *= 0.5;
    }
    fit.trace.push_back(objective);
  }
  return fit;
}

}  // namespace

SvmModel fit_svm(const Matrix& x, std::span<const int> labels, const SvmParams& params, std::uint64_t seed,
                 std::size_t threads) {
  if (x.rows() == 0) throw DomainError("svm: empty training data");
  if (!(params.c > 0)) throw DomainError("svm: C must be > 0");
  const std::size_t p = x.cols();

  SvmModel model;
  model.weights = Matrix(kClassCount, p + 1);
  model.objective_trace.resize(kClassCount);
  parallel_for(kClassCount, threads, [&](std::size_t k) {
    std::vector<double> signs(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) signs[i] = labels[i] == static_cast<int>(k) ? 1.0 : -1.0;
    Rng rng(derive_seed(seed, "svm_class", k));
    BinaryFit fit = fit_binary(x, signs, params, rng);
    auto row = model.weights.row(k);
    std::copy(fit.w.begin(), fit.w.end(), row.begin());
    row[p] = fit.bias;
    model.objective_trace[k] = std::move(fit.trace);
  });
  return model;
}

std::array<double, kClassCount> SvmModel::decision_values(std::span<const double> row) const {
  std::array<double, kClassCount> out{};
  const std::size_t p = row.size();
  for (std::size_t k = 0; k < kClassCount; ++k) {
    auto w = weights.row(k);
    double s = w[p];
    for (std::size_t j = 0; j < p; ++j) s += w[j] * row[j];
    out[k] = s;
  }
  return out;
}

int SvmModel::predict(std::span<const double> row) const { return argmax(decision_values(row)); }

}  // namespace readmit
