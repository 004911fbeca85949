#pragma once

// Fitted-model representations and the training routines behind each learner
// family. Most callers want learners.hpp; this header exposes the pieces the
// tests and benchmarks poke at directly.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "readmit/features.hpp"
#include "readmit/matrix.hpp"
#include "readmit/rng.hpp"

namespace readmit {

// --- CART ------------------------------------------------------------------------

struct TreeParams {
  std::optional<std::size_t> max_depth;  // nullopt: grow until pure or too small
  std::size_t min_samples_split = 2;
  std::size_t min_samples_leaf = 1;
  std::optional<std::size_t> max_features;  // nullopt: every feature at every split
};

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // rows with x[feature] <= threshold go left
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;  // class index for classifiers, output for regressors
};

struct DecisionTree {
  std::vector<TreeNode> nodes;

  std::size_t leaf_index(std::span<const double> row) const;
  double value(std::span<const double> row) const { return nodes[leaf_index(row)].value; }
  std::size_t depth() const;
};

// Per-feature rank encoding of a matrix (sorted distinct values plus each
// cell's rank). Built once per training matrix and shared by all trees grown
// on it.
class SortedColumns {
 public:
  explicit SortedColumns(const Matrix& x);

  std::size_t n_features() const noexcept { return distinct_.size(); }
  std::uint32_t rank(std::size_t row, std::size_t feature) const { return ranks_[feature][row]; }
  std::span<const double> distinct(std::size_t feature) const { return distinct_[feature]; }

 private:
  std::vector<std::vector<std::uint32_t>> ranks_;
  std::vector<std::vector<double>> distinct_;
};

// Gini CART over `samples` (row indices, repeats allowed for bootstrap).
// Thresholds are midpoints between consecutive distinct values; the first
// best split found wins ties (features visited in index order when all are
// considered).
DecisionTree grow_classification_tree(const SortedColumns& cols, std::span<const int> labels,
                                      std::span<const std::size_t> samples, const TreeParams& params, Rng& rng);

// Least-squares CART on a real-valued target.
DecisionTree grow_regression_tree(const SortedColumns& cols, std::span<const double> target,
                                  std::span<const std::size_t> samples, const TreeParams& params, Rng& rng);

// Feature count for "auto": floor(sqrt(p)), at least 1.
std::size_t auto_max_features(std::size_t n_features);

// --- Gaussian naive Bayes -------------------------------------------------------------

struct NaiveBayesModel {
  std::array<double, kClassCount> log_prior{};  // -inf for classes absent from training
  Matrix mean;                                  // K x p
  Matrix variance;                              // K x p, smoothing included
  double epsilon = 0.0;

  std::array<double, kClassCount> joint_log_likelihood(std::span<const double> row) const;
  std::array<double, kClassCount> posterior(std::span<const double> row) const;
  int predict(std::span<const double> row) const;
};

// Per-class Gaussian per feature; variances get epsilon = var_smoothing *
// (largest feature variance over all rows), floored at var_smoothing when
// every feature is constant.
NaiveBayesModel fit_naive_bayes(const Matrix& x, std::span<const int> labels, double var_smoothing);

// --- Random forest ---------------------------------------------------------------------

struct ForestParams {
  std::size_t n_estimators = 100;
  TreeParams tree;
  bool bootstrap = true;
};

struct ForestModel {
  std::vector<DecisionTree> trees;

  int predict(std::span<const double> row) const;  // majority vote, ties to the lowest class
};

// Tree t draws from derive_seed(seed, "tree", t), so any schedule reproduces
// the serial result.
ForestModel fit_forest(const Matrix& x, std::span<const int> labels, const ForestParams& params, std::uint64_t seed,
                       std::size_t threads);

// --- Gradient boosting -------------------------------------------------------------------

struct BoostingParams {
  double learning_rate = 0.1;
  std::size_t n_estimators = 100;
  TreeParams tree{3, 2, 1, std::nullopt};
};

struct BoostingModel {
  std::array<double, kClassCount> init{};  // log class priors
  double learning_rate = 0.1;
  std::vector<DecisionTree> trees;          // round-major: trees[round * K + k]
  std::vector<double> training_deviance;    // after init, then after each round

  std::array<double, kClassCount> scores(std::span<const double> row) const;
  int predict(std::span<const double> row) const;
};

// Multinomial deviance boosting: per round and class, a least-squares tree on
// the residuals 1{y=k} - p_k with Newton leaf values
// (K-1)/K * sum(r) / sum(|r| (1 - |r|)).
BoostingModel fit_boosting(const Matrix& x, std::span<const int> labels, const BoostingParams& params,
                           std::uint64_t seed);

// Sum over rows of -log p_{y_i} for the given class scores (rows x K).
double multinomial_deviance(const Matrix& scores, std::span<const int> labels);

// --- Logistic regression -------------------------------------------------------------------

struct LogisticParams {
  double c = 1.0;
  std::size_t max_iter = 100;
  double tol = 1e-6;
};

struct LogisticModel {
  Matrix weights;  // K x (p + 1); the last column is the unpenalized intercept
  std::size_t iterations = 0;
  double gradient_norm = 0.0;
  std::vector<double> objective_trace;

  std::array<double, kClassCount> scores(std::span<const double> row) const;
  int predict(std::span<const double> row) const;
};

// sum_i cross-entropy_i + ||W||^2 / (2C) over the non-intercept weights.
// Writes the gradient (same shape as `weights`) when `gradient` is non-null.
double logistic_objective(const Matrix& x, std::span<const int> labels, const Matrix& weights, double c,
                          Matrix* gradient);

// Full-batch gradient descent with Armijo backtracking, starting from zero
// weights and log-prior intercepts.
LogisticModel fit_logistic(const Matrix& x, std::span<const int> labels, const LogisticParams& params);

// --- Linear SVM ------------------------------------------------------------------------------

struct SvmParams {
  double c = 1.0;
  std::size_t max_epochs = 30;
};

struct SvmModel {
  Matrix weights;  // K x (p + 1); the last column is the bias
  std::vector<std::vector<double>> objective_trace;  // per class: after init, then per accepted or rejected epoch

  std::array<double, kClassCount> decision_values(std::span<const double> row) const;
  int predict(std::span<const double> row) const;
};

// 1/2 ||w||^2 + C * sum_i max(0, 1 - y_i (w.x_i + b)), y in {-1, +1}.
double svm_objective(const Matrix& x, std::span<const double> signs, std::span<const double> w, double bias,
                     double c);

// One-vs-rest; each binary problem runs epoch-shuffled subgradient steps. An
// epoch that would raise the objective is undone and the step is halved, so
// the recorded objective never increases.
SvmModel fit_svm(const Matrix& x, std::span<const int> labels, const SvmParams& params, std::uint64_t seed,
                 std::size_t threads);

// Index of the largest value; ties go to the lowest index.
int argmax(std::span<const double> values);

}  // namespace readmit
