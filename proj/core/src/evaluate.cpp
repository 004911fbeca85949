#include "readmit/evaluate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "readmit/csv.hpp"
#include "readmit/error.hpp"
#include "readmit/parallel.hpp"
#include "readmit/rng.hpp"

namespace readmit {

std::size_t ConfusionMatrix::total() const { return std::accumulate(cells_.begin(), cells_.end(), std::size_t{0}); }

std::size_t ConfusionMatrix::trace() const {
  std::size_t t = 0;
  for (std::size_t i = 0; i < k_; ++i) t += at(i, i);
  return t;
}

std::size_t ConfusionMatrix::row_sum(std::size_t truth) const {
  std::size_t s = 0;
  for (std::size_t j = 0; j < k_; ++j) s += at(truth, j);
  return s;
}

std::size_t ConfusionMatrix::col_sum(std::size_t predicted) const {
  std::size_t s = 0;
  for (std::size_t i = 0; i < k_; ++i) s += at(i, predicted);
  return s;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.k_ != k_) throw DomainError("confusion matrices of different sizes");
  for (std::size_t i = 0; i < cells_.size(); ++i) cells_[i] += other.cells_[i];
  return *this;
}

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred, std::size_t k) {
  if (y_true.size() != y_pred.size())
    throw DomainError(fmt::format("confusion: {} true labels vs {} predictions", y_true.size(), y_pred.size()));
  ConfusionMatrix cm(k);
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    int t = y_true[i];
    int p = y_pred[i];
    if (t < 0 || p < 0 || static_cast<std::size_t>(t) >= k || static_cast<std::size_t>(p) >= k)
      throw DomainError(fmt::format("confusion: label out of range at row {} ({}, {}) for {} classes", i, t, p, k));
    ++cm.at(static_cast<std::size_t>(t), static_cast<std::size_t>(p));
  }
  return cm;
}

EvalReport metrics(const ConfusionMatrix& cm) {
  const std::size_t n = cm.total();
  if (n == 0) throw DomainError("metrics: empty confusion matrix");
  const std::size_t k = cm.classes();

  EvalReport r;
  r.confusion = cm;
  r.precision.assign(k, 0.0);
  r.recall.assign(k, 0.0);
  r.f1.assign(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t tp = cm.at(c, c);
    std::size_t predicted = cm.col_sum(c);
    std::size_t actual = cm.row_sum(c);
    if (predicted == 0 || actual == 0) ++r.zero_denominator_classes;
    double p = predicted ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
    double rc = actual ? static_cast<double>(tp) / static_cast<double>(actual) : 0.0;
    r.precision[c] = p;
    r.recall[c] = rc;
    r.f1[c] = p + rc > 0 ? 2 * p * rc / (p + rc) : 0.0;
  }
  auto mean = [k](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / double(k); };
  r.macro_precision = mean(r.precision);
  r.macro_recall = mean(r.recall);
  r.macro_f1 = mean(r.f1);

  // Pooled over classes: TP = trace, TP + FP = TP + FN = n.
  const auto tp = static_cast<double>(cm.trace());
  const auto total = static_cast<double>(n);
  r.accuracy = tp / total;
  r.micro_precision = tp / total;
  r.micro_recall = tp / total;
  r.micro_f1 = (2 * tp) / (2 * total);
  return r;
}

EvalReport mean_report(std::span<const EvalReport> reports) {
  if (reports.empty()) throw DomainError("mean_report: no reports");
  const std::size_t k = reports.front().confusion.classes();
  EvalReport m;
  m.confusion = ConfusionMatrix(k);
  m.precision.assign(k, 0.0);
  m.recall.assign(k, 0.0);
  m.f1.assign(k, 0.0);
  for (const auto& r : reports) {
    m.confusion += r.confusion;
    m.accuracy += r.accuracy;
    m.macro_precision += r.macro_precision;
    m.macro_recall += r.macro_recall;
    m.macro_f1 += r.macro_f1;
    m.micro_precision += r.micro_precision;
    m.micro_recall += r.micro_recall;
    m.micro_f1 += r.micro_f1;
    for (std::size_t c = 0; c < k; ++c) {
      m.precision[c] += r.precision[c];
      m.recall[c] += r.recall[c];
      m.f1[c] += r.f1[c];
    }
    m.zero_denominator_classes += r.zero_denominator_classes;
    m.wall_time_s += r.wall_time_s;
  }
  const auto n = static_cast<double>(reports.size());
  for (double* v : {&m.accuracy, &m.macro_precision, &m.macro_recall, &m.macro_f1, &m.micro_precision,
                    &m.micro_recall, &m.micro_f1, &m.wall_time_s})
    *v /= n;
  for (std::size_t c = 0; c < k; ++c) {
    m.precision[c] /= n;
    m.recall[c] /= n;
    m.f1[c] /= n;
  }
  return m;
}

EvalReport evaluate(const TrainedModel& model, const Matrix& x, std::span<const int> labels) {
  auto start = std::chrono::steady_clock::now();
  std::vector<int> predicted = model.predict(x);
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EvalReport r = metrics(confusion(labels, predicted));
  r.wall_time_s = seconds;
  return r;
}

// --- Splits -------------------------------------------------------------------

namespace {

// ceil(fraction * n), treating products within rounding noise of an integer
// as that integer.
std::size_t ceil_share(double fraction, std::size_t n) {
  double t = fraction * static_cast<double>(n);
  double r = std::round(t);
  if (std::abs(t - r) < 1e-9 * std::max(1.0, t)) return static_cast<std::size_t>(r);
  return static_cast<std::size_t>(std::ceil(t));
}

std::vector<std::vector<std::size_t>> rows_by_class(std::span<const int> labels) {
  std::vector<std::vector<std::size_t>> out(kClassCount);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    int y = labels[i];
    if (y < 0 || y >= static_cast<int>(kClassCount)) throw DomainError(fmt::format("label {} out of range", y));
    out[static_cast<std::size_t>(y)].push_back(i);
  }
  return out;
}

}  // namespace

SplitIndices split_indices(std::span<const int> labels, double train_fraction, std::uint64_t seed, bool stratified) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw DomainError(fmt::format("train fraction {} is outside (0, 1)", train_fraction));
  const std::size_t n = labels.size();
  if (n < 2) throw DomainError("split needs at least 2 rows");
  const std::size_t n_train = std::min(ceil_share(train_fraction, n), n - 1);

  Rng rng(derive_seed(seed, "split"));
  SplitIndices out;
  if (!stratified) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(order));
    out.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  } else {
    auto by_class = rows_by_class(labels);
    std::vector<std::size_t> take(kClassCount);
    std::vector<double> remainder(kClassCount);
    std::size_t allotted = 0;
    for (std::size_t c = 0; c < kClassCount; ++c) {
      double ideal = train_fraction * static_cast<double>(by_class[c].size());
      take[c] = static_cast<std::size_t>(std::floor(ideal));
      remainder[c] = ideal - std::floor(ideal);
      allotted += take[c];
    }
    std::vector<std::size_t> order(kClassCount);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t i = 0; allotted < n_train && i < order.size(); ++i) {
      std::size_t c = order[i];
      if (take[c] < by_class[c].size()) {
        ++take[c];
        ++allotted;
      }
    }
    for (std::size_t c = 0; c < kClassCount; ++c) {
      auto& rows = by_class[c];
      rng.shuffle(std::span<std::size_t>(rows));
      out.train.insert(out.train.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(take[c]));
      out.test.insert(out.test.end(), rows.begin() + static_cast<std::ptrdiff_t>(take[c]), rows.end());
    }
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::pair<FeatureMatrix, FeatureMatrix> split(const FeatureMatrix& m, double train_fraction, std::uint64_t seed,
                                              bool stratified) {
  SplitIndices idx = split_indices(m.labels, train_fraction, seed, stratified);
  return {m.select(idx.train), m.select(idx.test)};
}

std::vector<std::size_t> FoldPlan::test_rows(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i)
    if (assignments[i] == fold) out.push_back(i);
  return out;
}

std::vector<std::size_t> FoldPlan::train_rows(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i)
    if (assignments[i] != fold) out.push_back(i);
  return out;
}

std::vector<std::size_t> FoldPlan::fold_sizes() const {
  std::vector<std::size_t> out(k, 0);
  for (std::size_t f : assignments) ++out[f];
  return out;
}

FoldPlan make_fold_plan(std::span<const int> labels, std::size_t k, std::uint64_t seed, bool stratified) {
  if (k < 2) throw DomainError(fmt::format("cross-validation needs k >= 2 (got {})", k));
  if (labels.size() < k) throw DomainError(fmt::format("{} rows cannot fill {} folds", labels.size(), k));

  Rng rng(derive_seed(seed, "folds"));
  std::vector<std::size_t> order;
  order.reserve(labels.size());
  if (stratified) {
    for (auto& rows : rows_by_class(labels)) {
      rng.shuffle(std::span<std::size_t>(rows));
      order.insert(order.end(), rows.begin(), rows.end());
    }
  } else {
    order.resize(labels.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(order));
  }

  FoldPlan plan;
  plan.k = k;
  plan.stratified = stratified;
  plan.seed = seed;
  plan.assignments.resize(labels.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) plan.assignments[order[pos]] = pos % k;
  return plan;
}

CvResult cross_validate(const LearnerSpec& spec, const FeatureMatrix& m, const FoldPlan& plan, std::size_t threads) {
  if (plan.assignments.size() != m.n_rows())
    throw DomainError(
        fmt::format("fold plan covers {} rows but the matrix has {}", plan.assignments.size(), m.n_rows()));
  if (plan.k < 2) throw DomainError("cross-validation needs k >= 2");

  CvResult result;
  result.folds.resize(plan.k);
  result.out_of_fold.assign(m.n_rows(), -1);
  std::vector<std::vector<int>> fold_predictions(plan.k);

  parallel_for(plan.k, threads, [&](std::size_t f) {
    auto train = plan.train_rows(f);
    auto test = plan.test_rows(f);
    FeatureMatrix train_m = m.select(train);
    FeatureMatrix test_m = m.select(test);
    LearnerSpec fold_spec = spec;
    fold_spec.seed = derive_seed(spec.seed, "fold", f);
    TrainedModel model = fit(fold_spec, train_m);
    auto start = std::chrono::steady_clock::now();
    fold_predictions[f] = model.predict(test_m.x);
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EvalReport r = metrics(confusion(test_m.labels, fold_predictions[f]));
    r.wall_time_s = model.train_seconds() + seconds;
    result.folds[f] = std::move(r);
  });

  for (std::size_t f = 0; f < plan.k; ++f) {
    auto test = plan.test_rows(f);
    for (std::size_t i = 0; i < test.size(); ++i) result.out_of_fold[test[i]] = fold_predictions[f][i];
  }
  result.mean = mean_report(result.folds);
  return result;
}

// --- Output -------------------------------------------------------------------

nlohmann::json to_json(const ConfusionMatrix& cm) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < cm.classes(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < cm.classes(); ++j) row.push_back(cm.at(i, j));
    rows.push_back(row);
  }
  return rows;
}

namespace {

std::string class_label(std::size_t c, std::size_t k) {
  return k == kClassCount ? std::string(kClassNames[c]) : std::to_string(c);
}

}  // namespace

nlohmann::json to_json(const EvalReport& r, bool include_wall_time) {
  nlohmann::json per_class = nlohmann::json::object();
  for (std::size_t c = 0; c < r.precision.size(); ++c)
    per_class[class_label(c, r.precision.size())] = {
        {"precision", r.precision[c]}, {"recall", r.recall[c]}, {"f1", r.f1[c]}};
  nlohmann::json j = {{"accuracy", r.accuracy},
                      {"macro_precision", r.macro_precision},
                      {"macro_recall", r.macro_recall},
                      {"macro_f1", r.macro_f1},
                      {"micro_precision", r.micro_precision},
                      {"micro_recall", r.micro_recall},
                      {"micro_f1", r.micro_f1},
                      {"per_class", per_class},
                      {"zero_denominator_classes", r.zero_denominator_classes},
                      {"confusion", to_json(r.confusion)}};
  if (include_wall_time) j["wall_time_s"] = r.wall_time_s;
  return j;
}

void write_confusion_csv(const ConfusionMatrix& cm, std::ostream& out) {
  const std::size_t k = cm.classes();
  std::vector<std::string> header{"true\\predicted"};
  for (std::size_t j = 0; j < k; ++j) header.push_back(class_label(j, k));
  csv::write_row(out, header);
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<std::string> row{class_label(i, k)};
    for (std::size_t j = 0; j < k; ++j) row.push_back(std::to_string(cm.at(i, j)));
    csv::write_row(out, row);
  }
}

}  // namespace readmit
