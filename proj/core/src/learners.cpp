#include "readmit/learners.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "readmit/error.hpp"

namespace readmit {

std::string_view to_string(Family f) {
  switch (f) {
    case Family::naive_bayes: return "naive_bayes";
    case Family::decision_tree: return "decision_tree";
    case Family::random_forest: return "random_forest";
    case Family::gradient_boosting: return "gradient_boosting";
    case Family::logistic_regression: return "logistic_regression";
    case Family::svm: return "svm";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  for (Family f : kAllFamilies)
    if (name == to_string(f)) return f;
  if (name == "nb") return Family::naive_bayes;
  if (name == "dt") return Family::decision_tree;
  if (name == "rf") return Family::random_forest;
  if (name == "gb") return Family::gradient_boosting;
  if (name == "lr") return Family::logistic_regression;
  throw DomainError("unknown learner family '" + std::string(name) + "'");
}

const ParamMap& default_params(Family f) {
  static const ParamMap nb = {{"var_smoothing", 1e-9}};
  static const ParamMap dt = {
      {"max_depth", "none"}, {"min_samples_split", 2}, {"min_samples_leaf", 1}, {"max_features", "none"}};
  static const ParamMap rf = {{"n_estimators", 100},     {"max_depth", "none"},  {"min_samples_split", 2},
                              {"min_samples_leaf", 1},   {"max_features", "auto"}, {"bootstrap", 1}};
  static const ParamMap gb = {{"learning_rate", 0.1},
                              {"n_estimators", 100},
                              {"max_depth", 3},
                              {"min_samples_split", 2},
                              {"min_samples_leaf", 1}};
  static const ParamMap lr = {{"C", 1.0}, {"max_iter", 100}, {"tol", 1e-6}};
  static const ParamMap svm = {{"C", 1.0}, {"max_epochs", 30}};
  switch (f) {
    case Family::naive_bayes: return nb;
    case Family::decision_tree: return dt;
    case Family::random_forest: return rf;
    case Family::gradient_boosting: return gb;
    case Family::logistic_regression: return lr;
    case Family::svm: return svm;
  }
  throw DomainError("unknown family");
}

namespace {

[[noreturn]] void bad_value(std::string_view name, const ParamValue& v, std::string_view expected) {
  throw DomainError(fmt::format("parameter {}={} is invalid: expected {}", name, v.to_string(), expected));
}

std::size_t count_param(std::string_view name, const ParamValue& v, double min) {
  if (!v.is_number() || v.number() != std::floor(v.number()) || v.number() < min)
    bad_value(name, v, fmt::format("an integer >= {}", min));
  return static_cast<std::size_t>(v.number());
}

double positive_param(std::string_view name, const ParamValue& v) {
  if (!v.is_number() || !(v.number() > 0) || !std::isfinite(v.number())) bad_value(name, v, "a positive number");
  return v.number();
}

std::optional<std::size_t> depth_param(const ParamValue& v) {
  if (v.is_text()) {
    if (v.text() == "none") return std::nullopt;
    bad_value("max_depth", v, "an integer >= 1 or \"none\"");
  }
  return count_param("max_depth", v, 1);
}

// nullopt = all features; resolved against the width at fit time.
std::optional<std::size_t> max_features_param(const ParamValue& v, std::size_t width) {
  if (v.is_text()) {
    if (v.text() == "auto" || v.text() == "sqrt") return auto_max_features(width);
    if (v.text() == "none" || v.text() == "all") return std::nullopt;
    bad_value("max_features", v, "an integer >= 1, \"auto\", \"sqrt\", \"none\" or \"all\"");
  }
  std::size_t k = count_param("max_features", v, 1);
  if (k >= width) return std::nullopt;
  return k;
}

void validate(std::string_view name, const ParamValue& v) {
  if (name == "max_depth") {
    depth_param(v);
  } else if (name == "max_features") {
    max_features_param(v, 1);
  } else if (name == "min_samples_split") {
    count_param(name, v, 2);
  } else if (name == "min_samples_leaf" || name == "max_iter" || name == "max_epochs") {
    count_param(name, v, 1);
  } else if (name == "n_estimators") {
    count_param(name, v, 0);
  } else if (name == "bootstrap") {
    if (!v.is_number() || (v.number() != 0 && v.number() != 1)) bad_value(name, v, "0 or 1");
  } else {
    positive_param(name, v);
  }
}

TreeParams tree_params(const ParamMap& p, std::size_t width) {
  TreeParams t;
  t.max_depth = depth_param(p.at("max_depth"));
  t.min_samples_split = count_param("min_samples_split", p.at("min_samples_split"), 2);
  t.min_samples_leaf = count_param("min_samples_leaf", p.at("min_samples_leaf"), 1);
  if (auto it = p.find("max_features"); it != p.end()) t.max_features = max_features_param(it->second, width);
  return t;
}

}  // namespace

ParamMap resolve_params(Family f, const ParamMap& params) {
  ParamMap out = default_params(f);
  for (const auto& [name, value] : params) {
    auto it = out.find(name);
    if (it == out.end())
      throw DomainError(fmt::format("parameter '{}' is not defined for {}", name, to_string(f)));
    validate(name, value);
    it->second = value;
  }
  if (f == Family::random_forest && out.at("n_estimators").number() < 1)
    throw DomainError("parameter n_estimators must be >= 1 for random_forest");
  return out;
}

TrainedModel::TrainedModel(Family family, ParamMap params, std::uint64_t seed, std::size_t width,
                           double train_seconds, Fitted fitted)
    : family_(family),
      params_(std::move(params)),
      seed_(seed),
      width_(width),
      train_seconds_(train_seconds),
      fitted_(std::move(fitted)) {}

TrainedModel fit(const LearnerSpec& spec, const Matrix& x, std::span<const int> labels) {
  if (x.rows() == 0) throw DomainError(fmt::format("{}: cannot fit on empty data", to_string(spec.family)));
  if (labels.size() != x.rows()) throw DomainError("label count does not match row count");
  for (int y : labels)
    if (y < 0 || y >= static_cast<int>(kClassCount)) throw DomainError(fmt::format("label {} out of range", y));

  ParamMap p = resolve_params(spec.family, spec.params);
  const std::size_t width = x.cols();
  auto start = std::chrono::steady_clock::now();

  TrainedModel::Fitted fitted = [&]() -> TrainedModel::Fitted {
    switch (spec.family) {
      case Family::naive_bayes:
        return fit_naive_bayes(x, labels, p.at("var_smoothing").number());
      case Family::decision_tree: {
        SortedColumns cols(x);
        std::vector<std::size_t> samples(x.rows());
        for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = i;
        Rng rng(derive_seed(spec.seed, "decision_tree"));
        return grow_classification_tree(cols, labels, samples, tree_params(p, width), rng);
      }
      case Family::random_forest: {
        ForestParams fp;
        fp.n_estimators = count_param("n_estimators", p.at("n_estimators"), 1);
        fp.tree = tree_params(p, width);
        fp.bootstrap = p.at("bootstrap").number() != 0;
        return fit_forest(x, labels, fp, spec.seed, spec.threads);
      }
      case Family::gradient_boosting: {
        BoostingParams bp;
        bp.learning_rate = p.at("learning_rate").number();
        bp.n_estimators = count_param("n_estimators", p.at("n_estimators"), 0);
        bp.tree = tree_params(p, width);
        return fit_boosting(x, labels, bp, spec.seed);
      }
      case Family::logistic_regression: {
        LogisticParams lp;
        lp.c = p.at("C").number();
        lp.max_iter = count_param("max_iter", p.at("max_iter"), 1);
        lp.tol = p.at("tol").number();
        return fit_logistic(x, labels, lp);
      }
      case Family::svm: {
        SvmParams sp;
        sp.c = p.at("C").number();
        sp.max_epochs = count_param("max_epochs", p.at("max_epochs"), 1);
        return fit_svm(x, labels, sp, spec.seed, spec.threads);
      }
    }
    throw DomainError("unknown family");
  }();

  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return TrainedModel(spec.family, std::move(p), spec.seed, width, seconds, std::move(fitted));
}

TrainedModel fit(const LearnerSpec& spec, const FeatureMatrix& data) { return fit(spec, data.x, data.labels); }

int TrainedModel::predict_row(std::span<const double> row) const {
  if (row.size() != width_)
    throw DomainError(fmt::format("row width {} does not match training width {}", row.size(), width_));
  return std::visit(
      [&](const auto& m) -> int {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, DecisionTree>)
          return static_cast<int>(m.value(row));
        else
          return m.predict(row);
      },
      fitted_);
}

std::vector<int> TrainedModel::predict(const Matrix& x) const {
  if (x.rows() == 0) return {};
  if (x.cols() != width_)
    throw DomainError(fmt::format("input width {} does not match training width {}", x.cols(), width_));
  std::vector<int> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = predict_row(x.row(i));
  return out;
}

// --- Serialization -------------------------------------------------------------

namespace {

using nlohmann::json;

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
  return rows;
}

Matrix matrix_from_json(const json& j) {
  Matrix m;
  for (const auto& row : j) m.append_row(row.get<std::vector<double>>());
  return m;
}

json tree_json(const DecisionTree& t) {
  json nodes = json::array();
  for (const auto& n : t.nodes) nodes.push_back(json::array({n.feature, n.threshold, n.left, n.right, n.value}));
  return nodes;
}

DecisionTree tree_from_json(const json& j) {
  DecisionTree t;
  for (const auto& n : j)
    t.nodes.push_back({n.at(0).get<std::int32_t>(), n.at(1).get<double>(), n.at(2).get<std::int32_t>(),
                       n.at(3).get<std::int32_t>(), n.at(4).get<double>()});
  return t;
}

// Log priors of absent classes are stored as null.
json log_priors_json(const std::array<double, kClassCount>& v) {
  json out = json::array();
  for (double x : v) out.push_back(std::isinf(x) ? json(nullptr) : json(x));
  return out;
}

std::array<double, kClassCount> log_priors_from_json(const json& j) {
  std::array<double, kClassCount> out{};
  for (std::size_t k = 0; k < kClassCount; ++k)
    out[k] = j.at(k).is_null() ? -std::numeric_limits<double>::infinity() : j.at(k).get<double>();
  return out;
}

json fitted_json(const TrainedModel::Fitted& fitted) {
  return std::visit(
      [](const auto& m) -> json {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, NaiveBayesModel>) {
          return {{"log_prior", log_priors_json(m.log_prior)},
                  {"mean", matrix_json(m.mean)},
                  {"variance", matrix_json(m.variance)},
                  {"epsilon", m.epsilon}};
        } else if constexpr (std::is_same_v<M, DecisionTree>) {
          return {{"nodes", tree_json(m)}};
        } else if constexpr (std::is_same_v<M, ForestModel>) {
          json trees = json::array();
          for (const auto& t : m.trees) trees.push_back(tree_json(t));
          return {{"trees", trees}};
        } else if constexpr (std::is_same_v<M, BoostingModel>) {
          json trees = json::array();
          for (const auto& t : m.trees) trees.push_back(tree_json(t));
          return {{"init", m.init},
                  {"learning_rate", m.learning_rate},
                  {"trees", trees},
                  {"training_deviance", m.training_deviance}};
        } else if constexpr (std::is_same_v<M, LogisticModel>) {
          return {{"weights", matrix_json(m.weights)},
                  {"iterations", m.iterations},
                  {"gradient_norm", m.gradient_norm}};
        } else {
          return {{"weights", matrix_json(m.weights)}};
        }
      },
      fitted);
}

TrainedModel::Fitted fitted_from_json(Family f, const json& j) {
  switch (f) {
    case Family::naive_bayes: {
      NaiveBayesModel m;
      m.log_prior = log_priors_from_json(j.at("log_prior"));
      m.mean = matrix_from_json(j.at("mean"));
      m.variance = matrix_from_json(j.at("variance"));
      m.epsilon = j.at("epsilon").get<double>();
      return m;
    }
    case Family::decision_tree:
      return tree_from_json(j.at("nodes"));
    case Family::random_forest: {
      ForestModel m;
      for (const auto& t : j.at("trees")) m.trees.push_back(tree_from_json(t));
      return m;
    }
    case Family::gradient_boosting: {
      BoostingModel m;
      m.init = j.at("init").get<std::array<double, kClassCount>>();
      m.learning_rate = j.at("learning_rate").get<double>();
      for (const auto& t : j.at("trees")) m.trees.push_back(tree_from_json(t));
      m.training_deviance = j.at("training_deviance").get<std::vector<double>>();
      return m;
    }
    case Family::logistic_regression: {
      LogisticModel m;
      m.weights = matrix_from_json(j.at("weights"));
      m.iterations = j.at("iterations").get<std::size_t>();
      m.gradient_norm = j.at("gradient_norm").get<double>();
      return m;
    }
    case Family::svm: {
      SvmModel m;
      m.weights = matrix_from_json(j.at("weights"));
      return m;
    }
  }
  throw DomainError("unknown family");
}

}  // namespace

namespace {

std::string_view algorithm(Family f) {
  switch (f) {
    case Family::naive_bayes: return "gaussian naive bayes, variance smoothing relative to the largest feature variance";
    case Family::decision_tree: return "cart, gini impurity, midpoint thresholds";
    case Family::random_forest: return "bootstrap-aggregated cart, per-split feature subsampling, majority vote";
    case Family::gradient_boosting: return "multinomial deviance boosting, least-squares trees, newton leaf values";
    case Family::logistic_regression: return "multinomial softmax, l2 penalty, full-batch gradient descent with armijo backtracking";
    case Family::svm: return "one-vs-rest linear hinge loss, epoch-shuffled subgradient descent";
  }
  return "?";
}

}  // namespace

nlohmann::json TrainedModel::manifest() const {
  return {{"family", to_string(family_)},
          {"algorithm", algorithm(family_)},
          {"params", params_},
          {"seed", seed_},
          {"feature_width", width_},
          {"train_seconds", train_seconds_}};
}

nlohmann::json TrainedModel::to_json() const {
  nlohmann::json j = manifest();
  j["fitted"] = fitted_json(fitted_);
  return j;
}

TrainedModel TrainedModel::from_json(const nlohmann::json& j) {
  Family f = parse_family(j.at("family").get<std::string>());
  ParamMap params = j.at("params").get<ParamMap>();
  return TrainedModel(f, std::move(params), j.at("seed").get<std::uint64_t>(), j.at("feature_width").get<std::size_t>(),
                      j.at("train_seconds").get<double>(), fitted_from_json(f, j.at("fitted")));
}

void TrainedModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << to_json().dump() << '\n';
}

TrainedModel TrainedModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  return from_json(nlohmann::json::parse(in));
}

}  // namespace readmit
