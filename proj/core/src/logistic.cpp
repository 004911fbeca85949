#include "readmit/models.hpp"

#include <algorithm>
#include <cmath>

#include "readmit/error.hpp"

namespace readmit {

double logistic_objective(const Matrix& x, std::span<const int> labels, const Matrix& weights, double c,
                          Matrix* gradient) {
  const std::size_t p = x.cols();
  if (weights.rows() != kClassCount || weights.cols() != p + 1)
    throw DomainError("logistic_objective: weight shape must be K x (p + 1)");
  if (gradient) *gradient = Matrix(kClassCount, p + 1);

  double loss = 0;
  std::array<double, kClassCount> z{};
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto row = x.row(i);
    for (std::size_t k = 0; k < kClassCount; ++k) {
      auto w = weights.row(k);
      double s = w[p];
      for (std::size_t j = 0; j < p; ++j) s += w[j] * row[j];
      z[k] = s;
    }
    double top = *std::max_element(z.begin(), z.end());
    double sum = 0;
    for (double v : z) sum += std::exp(v - top);
    double lse = top + std::log(sum);
    auto y = static_cast<std::size_t>(labels[i]);
    loss += lse - z[y];
    if (!gradient) continue;
    for (std::size_t k = 0; k < kClassCount; ++k) {
      double coef = std::exp(z[k] - lse) - (k == y ? 1.0 : 0.0);
      auto g = gradient->row(k);
      for (std::size_t j = 0; j < p; ++j) g[j] += coef * row[j];
      g[p] += coef;
    }
  }

  double reg = 0;
  for (std::size_t k = 0; k < kClassCount; ++k) {
    for (std::size_t j = 0; j < p; ++j) {
      double w = weights(k, j);
      reg += w * w;
      if (gradient) (*gradient)(k, j) += w / c;
    }
  }
  return loss + reg / (2.0 * c);
}

LogisticModel fit_logistic(const Matrix& x, std::span<const int> labels, const LogisticParams& params) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  if (n == 0) throw DomainError("logistic_regression: empty training data");
  if (!(params.c > 0)) throw DomainError("logistic_regression: C must be > 0");

  LogisticModel model;
  model.weights = Matrix(kClassCount, p + 1);
  std::array<double, kClassCount> count{};
  for (int y : labels) count[static_cast<std::size_t>(y)] += 1;
  for (std::size_t k = 0; k < kClassCount; ++k)
    model.weights(k, p) = std::log(std::max(count[k], 1e-12) / static_cast<double>(n));

  double sq_norms = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 1.0;
    for (double v : x.row(i)) s += v * v;
    sq_norms += s;
  }
  // 1 / (curvature bound of the data term + the penalty); grown and shrunk adaptively.
  double step = 1.0 / (0.5 * sq_norms + 1.0 / params.c);

  Matrix grad;
  double f = logistic_objective(x, labels, model.weights, params.c, &grad);
  model.objective_trace.push_back(f);
  Matrix trial(kClassCount, p + 1);
  for (model.iterations = 0; model.iterations < params.max_iter; ++model.iterations) {
    double g2 = 0;
    for (double v : grad.data()) g2 += v * v;
    model.gradient_norm = std::sqrt(g2);
    if (model.gradient_norm < params.tol) break;

    double f_new = f;
    bool accepted = false;
    while (step > 1e-300) {
      for (std::size_t k = 0; k < kClassCount; ++k)
        for (std::size_t j = 0; j <= p; ++j) trial(k, j) = model.weights(k, j) - step * grad(k, j);
      f_new = logistic_objective(x, labels, trial, params.c, nullptr);
      if (f_new <= f - 0.5 * step * g2) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    model.weights = trial;
    f = logistic_objective(x, labels, model.weights, params.c, &grad);
    model.objective_trace.push_back(f);
    step *= 2.0;
  }
  double g2 = 0;
  for (double v : grad.data()) g2 += v * v;
  model.gradient_norm = std::sqrt(g2);
  return model;
}

std::array<double, kClassCount> LogisticModel::scores(std::span<const double> row) const {
  std::array<double, kClassCount> z{};
  const std::size_t p = row.size();
  for (std::size_t k = 0; k < kClassCount; ++k) {
    auto w = weights.row(k);
    double s = w[p];
    for (std::size_t j = 0; j < p; ++j) s += w[j] * row[j];
    z[k] = s;
  }
  return z;
}

int LogisticModel::predict(std::span<const double> row) const { return argmax(scores(row)); }

}  // namespace readmit
