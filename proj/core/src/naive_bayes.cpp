#include "readmit/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "readmit/error.hpp"

namespace readmit {

NaiveBayesModel fit_naive_bayes(const Matrix& x, std::span<const int> labels, double var_smoothing) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  if (n == 0) throw DomainError("naive_bayes: empty training data");
  if (!(var_smoothing > 0)) throw DomainError("naive_bayes: var_smoothing must be > 0");

  NaiveBayesModel model;
  model.mean = Matrix(kClassCount, p);
  model.variance = Matrix(kClassCount, p);
  std::array<double, kClassCount> count{};
  std::vector<double> all_mean(p, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    auto k = static_cast<std::size_t>(labels[i]);
    count[k] += 1;
    auto row = x.row(i);
    for (std::size_t j = 0; j < p; ++j) {
      model.mean(k, j) += row[j];
      all_mean[j] += row[j];
    }
  }
  for (std::size_t j = 0; j < p; ++j) all_mean[j] /= static_cast<double>(n);
  for (std::size_t k = 0; k < kClassCount; ++k)
    if (count[k] > 0)
      for (std::size_t j = 0; j < p; ++j) model.mean(k, j) /= count[k];

  std::vector<double> all_var(p, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto k = static_cast<std::size_t>(labels[i]);
    auto row = x.row(i);
    for (std::size_t j = 0; j < p; ++j) {
      double d = row[j] - model.mean(k, j);
      model.variance(k, j) += d * d;
      double a = row[j] - all_mean[j];
      all_var[j] += a * a;
    }
  }
  double max_var = 0;
  for (double v : all_var) max_var = std::max(max_var, v / static_cast<double>(n));
  model.epsilon = max_var > 0 ? var_smoothing * max_var : var_smoothing;

  for (std::size_t k = 0; k < kClassCount; ++k) {
    model.log_prior[k] =
        count[k] > 0 ? std::log(count[k] / static_cast<double>(n)) : -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < p; ++j) {
      double v = count[k] > 0 ? model.variance(k, j) / count[k] : 0.0;
      model.variance(k, j) = v + model.epsilon;
    }
  }
  return model;
}

std::array<double, kClassCount> NaiveBayesModel::joint_log_likelihood(std::span<const double> row) const {
  std::array<double, kClassCount> out{};
  for (std::size_t k = 0; k < kClassCount; ++k) {
    if (std::isinf(log_prior[k])) {
      out[k] = -std::numeric_limits<double>::infinity();
      continue;
    }
    double s = log_prior[k];
    for (std::size_t j = 0; j < row.size(); ++j) {
      double var = variance(k, j);
      double d = row[j] - mean(k, j);
      s -= 0.5 * std::log(2.0 * std::numbers::pi * var) + d * d / (2.0 * var);
    }
    out[k] = s;
  }
  return out;
}

std::array<double, kClassCount> NaiveBayesModel::posterior(std::span<const double> row) const {
  auto jll = joint_log_likelihood(row);
  double top = *std::max_element(jll.begin(), jll.end());
  std::array<double, kClassCount> out{};
  double z = 0;
  for (std::size_t k = 0; k < kClassCount; ++k) {
    out[k] = std::isinf(jll[k]) ? 0.0 : std::exp(jll[k] - top);
    z += out[k];
  }
  for (double& v : out) v /= z;
  return out;
}

int NaiveBayesModel::predict(std::span<const double> row) const { return argmax(joint_log_likelihood(row)); }

}  // namespace readmit
