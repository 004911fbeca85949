#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "readmit/features.hpp"
#include "readmit/learners.hpp"

namespace readmit {

// Entry (i, j) counts rows of true class i predicted as j.
class ConfusionMatrix {
 public:
  ConfusionMatrix() : ConfusionMatrix(kClassCount) {}
  explicit ConfusionMatrix(std::size_t k) : k_(k), cells_(k * k, 0) {}

  std::size_t classes() const noexcept { return k_; }
  std::size_t& at(std::size_t truth, std::size_t predicted) { return cells_[truth * k_ + predicted]; }
  std::size_t at(std::size_t truth, std::size_t predicted) const { return cells_[truth * k_ + predicted]; }

  std::size_t total() const;
  std::size_t trace() const;
  std::size_t row_sum(std::size_t truth) const;
  std::size_t col_sum(std::size_t predicted) const;

  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t k_;
  std::vector<std::size_t> cells_;
};

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred, std::size_t k = kClassCount);

struct EvalReport {
  ConfusionMatrix confusion;
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double micro_precision = 0.0;
  double micro_recall = 0.0;
  double micro_f1 = 0.0;
  std::vector<double> precision;  // per class
  std::vector<double> recall;
  std::vector<double> f1;
  // Classes whose precision or recall had a zero denominator (scored as 0).
  std::size_t zero_denominator_classes = 0;
  double wall_time_s = 0.0;
};

// Throws DomainError on an empty matrix.
EvalReport metrics(const ConfusionMatrix& cm);

// Scalars and per-class values are averaged; confusion matrices and
// zero-denominator counts are summed.
EvalReport mean_report(std::span<const EvalReport> reports);

// Predicts `x` and scores against `labels`; wall time covers prediction only.
EvalReport evaluate(const TrainedModel& model, const Matrix& x, std::span<const int> labels);

// --- Splits and folds ---------------------------------------------------------

struct SplitIndices {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

// The train side gets ceil(fraction * n) rows. Stratified splits allot each
// class floor(fraction * n_c) rows plus one for the classes with the largest
// remainders (lowest class first on ties) until the total is reached.
SplitIndices split_indices(std::span<const int> labels, double train_fraction, std::uint64_t seed, bool stratified);

std::pair<FeatureMatrix, FeatureMatrix> split(const FeatureMatrix& m, double train_fraction, std::uint64_t seed,
                                              bool stratified = true);

struct FoldPlan {
  std::size_t k = 5;
  std::vector<std::size_t> assignments;  // row -> fold
  bool stratified = true;
  std::uint64_t seed = 0;

  std::vector<std::size_t> test_rows(std::size_t fold) const;
  std::vector<std::size_t> train_rows(std::size_t fold) const;
  std::vector<std::size_t> fold_sizes() const;
};

// Rows are shuffled (within each class when stratified), the class lists are
// concatenated and position i goes to fold i mod k.
FoldPlan make_fold_plan(std::span<const int> labels, std::size_t k, std::uint64_t seed, bool stratified = true);

struct CvResult {
  std::vector<EvalReport> folds;
  EvalReport mean;
  std::vector<int> out_of_fold;  // prediction for every row, from the fold that held it out
};

// Fold f fits with seed derive_seed(spec.seed, "fold", f). Folds run on up to
// `threads` workers with identical results for any count.
CvResult cross_validate(const LearnerSpec& spec, const FeatureMatrix& m, const FoldPlan& plan,
                        std::size_t threads = 1);

// --- Output -------------------------------------------------------------------

nlohmann::json to_json(const ConfusionMatrix& cm);
nlohmann::json to_json(const EvalReport& r, bool include_wall_time = true);

// Grid with true classes as rows and predicted classes as columns.
void write_confusion_csv(const ConfusionMatrix& cm, std::ostream& out);

}  // namespace readmit
