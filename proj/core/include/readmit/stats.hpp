#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "readmit/params.hpp"

namespace readmit {

enum class Decision { reject_null, fail_to_reject };

std::string_view to_string(Decision d);

// Minimum win count needed to reject, keyed by the number of non-tied pairs.
using CriticalTable = std::map<std::size_t, std::size_t>;

// The single entry used in the original two-model comparison: 8 wins out of 10 at 0.05.
const CriticalTable& reported_critical_values();

struct SignTestResult {
  std::size_t wins_a = 0;
  std::size_t wins_b = 0;
  std::size_t ties = 0;
  std::size_t n_effective = 0;
  double p_value = 1.0;  // exact two-sided binomial, p = 0.5
  double alpha = 0.05;
  Decision decision = Decision::fail_to_reject;
  // Present when a critical table has an entry for n_effective.
  std::optional<std::size_t> critical_value;
  std::optional<Decision> critical_decision;  // reject when max(wins) >= critical_value
};

// Ties (exact equality) are dropped; reject when p_value < alpha.
SignTestResult sign_test(std::span<const double> a, std::span<const double> b, double alpha = 0.05,
                         const CriticalTable* table = nullptr);

// min(1, 2 * P[X <= min(k, n - k)]) for X ~ Binomial(n, 1/2). Exact up to n = 53.
double binomial_two_sided(std::size_t k, std::size_t n);

struct ScoredConfig {
  double score = 0.0;
  ParamMap params;
};

struct BoxplotSummary {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double iqr = 0.0;
  double lower_fence = 0.0;
  double upper_fence = 0.0;
  std::vector<ScoredConfig> outliers;  // by score, then params
};

// Linear interpolation at position (n - 1) * q of the sorted values.
double quantile(std::span<const double> sorted, double q);

// Tukey fences at 1.5 IQR; outliers lie strictly outside. Needs >= 4 values.
BoxplotSummary boxplot_summary(std::span<const ScoredConfig> values);

// param -> value -> count over the outlier configurations.
using AttributionTable = std::map<std::string, std::map<std::string, std::size_t>>;

AttributionTable outlier_attribution(const BoxplotSummary& summary);

nlohmann::json to_json(const SignTestResult& r);
nlohmann::json to_json(const BoxplotSummary& s);

// score, rank (1 = highest), params, is_outlier.
void write_boxplot_csv(std::span<const ScoredConfig> values, const BoxplotSummary& summary, std::ostream& out);

}  // namespace readmit
