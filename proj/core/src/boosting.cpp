#include "readmit/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "readmit/error.hpp"

namespace readmit {

namespace {

void softmax(std::span<const double> scores, std::span<double> out) {
  double top = *std::max_element(scores.begin(), scores.end());
  double z = 0;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    out[k] = std::exp(scores[k] - top);
    z += out[k];
  }
  for (double& v : out) v /= z;
}

}  // namespace

double multinomial_deviance(const Matrix& scores, std::span<const int> labels) {
  double total = 0;
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    auto s = scores.row(i);
    double top = *std::max_element(s.begin(), s.end());
    double z = 0;
    for (double v : s) z += std::exp(v - top);
    total += top + std::log(z) - s[static_cast<std::size_t>(labels[i])];
  }
  return total;
}

BoostingModel fit_boosting(const Matrix& x, std::span<const int> labels, const BoostingParams& params,
                           std::uint64_t seed) {
  const std::size_t n = x.rows();
  if (n == 0) throw DomainError("gradient_boosting: empty training data");
  if (!(params.learning_rate > 0)) throw DomainError("gradient_boosting: learning_rate must be > 0");

  BoostingModel model;
  model.learning_rate = params.learning_rate;
  std::array<double, kClassCount> count{};
  for (int y : labels) count[static_cast<std::size_t>(y)] += 1;
  for (std::size_t k = 0; k < kClassCount; ++k) {
    double prior = count[k] / static_cast<double>(n);
    // Absent classes get a very low but finite score.
    model.init[k] = prior > 0 ? std::log(prior) : std::log(std::numeric_limits<double>::min());
  }

  Matrix scores(n, kClassCount);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < kClassCount; ++k) scores(i, k) = model.init[k];
  model.training_deviance.push_back(multinomial_deviance(scores, labels));
  if (params.n_estimators == 0) return model;

  const SortedColumns cols(x);
  std::vector<std::size_t> samples(n);
  std::iota(samples.begin(), samples.end(), 0);
  Matrix prob(n, kClassCount);
  std::vector<double> residual(n);
  std::vector<std::size_t> leaf_of(n);
  const double k_factor = static_cast<double>(kClassCount - 1) / static_cast<double>(kClassCount);
  Rng rng(derive_seed(seed, "boosting"));

  model.trees.reserve(params.n_estimators * kClassCount);
  for (std::size_t round = 0; round < params.n_estimators; ++round) {
    for (std::size_t i = 0; i < n; ++i) softmax(scores.row(i), prob.row(i));

    for (std::size_t k = 0; k < kClassCount; ++k) {
      for (std::size_t i = 0; i < n; ++i)
        residual[i] = (labels[i] == static_cast<int>(k) ? 1.0 : 0.0) - prob(i, k);
      DecisionTree tree = grow_regression_tree(cols, residual, samples, params.tree, rng);

      std::vector<double> num(tree.nodes.size(), 0.0);
      std::vector<double> den(tree.nodes.size(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        leaf_of[i] = tree.leaf_index(x.row(i));
        double r = residual[i];
        num[leaf_of[i]] += r;
        den[leaf_of[i]] += std::abs(r) * (1.0 - std::abs(r));
      }
      for (std::size_t node = 0; node < tree.nodes.size(); ++node) {
        if (tree.nodes[node].feature >= 0) continue;
        tree.nodes[node].value = den[node] < 1e-150 ? 0.0 : k_factor * num[node] / den[node];
      }
      for (std::size_t i = 0; i < n; ++i) scores(i, k) += params.learning_rate * tree.nodes[leaf_of[i]].value;
      model.trees.push_back(std::move(tree));
    }
    model.training_deviance.push_back(multinomial_deviance(scores, labels));
  }
  return model;
}

std::array<double, kClassCount> BoostingModel::scores(std::span<const double> row) const {
  std::array<double, kClassCount> f = init;
  for (std::size_t t = 0; t < trees.size(); ++t) f[t % kClassCount] += learning_rate * trees[t].value(row);
  return f;
}

int BoostingModel::predict(std::span<const double> row) const { return argmax(scores(row)); }

}  // namespace readmit
