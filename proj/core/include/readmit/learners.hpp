#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "readmit/features.hpp"
#include "readmit/models.hpp"
#include "readmit/params.hpp"

namespace readmit {

enum class Family { naive_bayes, decision_tree, random_forest, gradient_boosting, logistic_regression, svm };

inline constexpr std::array<Family, 6> kAllFamilies = {Family::naive_bayes,         Family::gradient_boosting,
                                                      Family::random_forest,       Family::decision_tree,
                                                      Family::logistic_regression, Family::svm};

std::string_view to_string(Family f);
// Accepts the canonical names and the short forms nb, dt, rf, gb, lr.
Family parse_family(std::string_view name);

struct LearnerSpec {
  Family family = Family::naive_bayes;
  ParamMap params;  // unset parameters take the family defaults
  std::uint64_t seed = 0;
  std::size_t threads = 1;  // execution only; results do not depend on it
};

// Parameter names the family accepts, with their defaults.
const ParamMap& default_params(Family f);

// Defaults merged with `spec.params`; throws DomainError on unknown names or
// out-of-domain values.
ParamMap resolve_params(Family f, const ParamMap& params);

class TrainedModel {
 public:
  using Fitted = std::variant<NaiveBayesModel, DecisionTree, ForestModel, BoostingModel, LogisticModel, SvmModel>;

  TrainedModel(Family family, ParamMap params, std::uint64_t seed, std::size_t width, double train_seconds,
               Fitted fitted);

  Family family() const noexcept { return family_; }
  const ParamMap& params() const noexcept { return params_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t width() const noexcept { return width_; }
  double train_seconds() const noexcept { return train_seconds_; }
  const Fitted& fitted() const noexcept { return fitted_; }

  int predict_row(std::span<const double> row) const;
  // Throws DomainError when the column count differs from the training width
  // (an empty 0-row matrix of any width yields no labels).
  std::vector<int> predict(const Matrix& x) const;

  // family, params, seed, width, wall time.
  nlohmann::json manifest() const;
  // manifest plus the fitted parameters; from_json(to_json()) predicts identically.
  nlohmann::json to_json() const;
  static TrainedModel from_json(const nlohmann::json& j);

  void save(const std::filesystem::path& path) const;
  static TrainedModel load(const std::filesystem::path& path);

 private:
  Family family_;
  ParamMap params_;
  std::uint64_t seed_;
  std::size_t width_;
  double train_seconds_;
  Fitted fitted_;
};

TrainedModel fit(const LearnerSpec& spec, const Matrix& x, std::span<const int> labels);
TrainedModel fit(const LearnerSpec& spec, const FeatureMatrix& data);

}  // namespace readmit
