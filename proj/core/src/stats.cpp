#include "readmit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include <fmt/format.h>

#include "readmit/csv.hpp"
#include "readmit/error.hpp"

namespace readmit {

std::string_view to_string(Decision d) { return d == Decision::reject_null ? "reject_null" : "fail_to_reject"; }

const CriticalTable& reported_critical_values() {
  static const CriticalTable table = {{10, 8}};
  return table;
}

double binomial_two_sided(std::size_t k, std::size_t n) {
  if (k > n) throw DomainError("binomial tail: k exceeds n");
  if (n == 0) return 1.0;
  k = std::min(k, n - k);
  if (n <= 53) {
    std::uint64_t coef = 1;
    std::uint64_t tail = 0;
    for (std::size_t i = 0; i <= k; ++i) {
      tail += coef;
      coef = coef * (n - i) / (i + 1);
    }
    return std::min(1.0, std::ldexp(static_cast<double>(tail), 1 - static_cast<int>(n)));
  }
  long double tail = 0.0L;
  for (std::size_t i = 0; i <= k; ++i) {
    long double log_pmf = std::lgamma(static_cast<long double>(n) + 1) - std::lgamma(static_cast<long double>(i) + 1) -
                          std::lgamma(static_cast<long double>(n - i) + 1) -
                          static_cast<long double>(n) * std::log(2.0L);
    tail += std::exp(log_pmf);
  }
  return std::min(1.0, static_cast<double>(2 * tail));
}

SignTestResult sign_test(std::span<const double> a, std::span<const double> b, double alpha,
                         const CriticalTable* table) {
  if (a.size() != b.size())
    throw DomainError(fmt::format("sign test: {} scores vs {} scores", a.size(), b.size()));
  if (a.empty()) throw DomainError("sign test: no paired scores");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError(fmt::format("sign test: alpha {} outside (0, 1)", alpha));

  SignTestResult r;
  r.alpha = alpha;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i])
      ++r.wins_a;
    else if (b[i] > a[i])
      ++r.wins_b;
    else
      ++r.ties;
  }
  r.n_effective = r.wins_a + r.wins_b;
  r.p_value = binomial_two_sided(std::min(r.wins_a, r.wins_b), r.n_effective);
  r.decision = r.p_value < alpha ? Decision::reject_null : Decision::fail_to_reject;
  if (table) {
    if (auto it = table->find(r.n_effective); it != table->end()) {
      r.critical_value = it->second;
      r.critical_decision =
          std::max(r.wins_a, r.wins_b) >= it->second ? Decision::reject_null : Decision::fail_to_reject;
    }
  }
  return r;
}

double quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw DomainError("quantile of an empty vector");
  double pos = static_cast<double>(sorted.size() - 1) * q;
  auto lo = static_cast<std::size_t>(std::floor(pos));
  if (lo + 1 >= sorted.size()) return sorted.back();
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

namespace {

bool scored_before(const ScoredConfig& a, const ScoredConfig& b) {
  if (a.score != b.score) return a.score < b.score;
  return a.params < b.params;
}

}  // namespace

BoxplotSummary boxplot_summary(std::span<const ScoredConfig> values) {
  if (values.size() < 4) throw DomainError(fmt::format("boxplot needs at least 4 values (got {})", values.size()));
  std::vector<double> sorted;
  sorted.reserve(values.size());
  for (const auto& v : values) {
    if (!std::isfinite(v.score)) throw DomainError("boxplot: non-finite score");
    sorted.push_back(v.score);
  }
  std::sort(sorted.begin(), sorted.end());

  BoxplotSummary s;
  s.min = sorted.front();
  s.max = sorted.back();
  s.q1 = quantile(sorted, 0.25);
  s.median = quantile(sorted, 0.5);
  s.q3 = quantile(sorted, 0.75);
  s.iqr = s.q3 - s.q1;
  s.lower_fence = s.q1 - 1.5 * s.iqr;
  s.upper_fence = s.q3 + 1.5 * s.iqr;
  for (const auto& v : values)
    if (v.score < s.lower_fence || v.score > s.upper_fence) s.outliers.push_back(v);
  std::sort(s.outliers.begin(), s.outliers.end(), scored_before);
  return s;
}

AttributionTable outlier_attribution(const BoxplotSummary& summary) {
  AttributionTable table;
  for (const auto& o : summary.outliers)
    for (const auto& [name, value] : o.params) ++table[name][value.to_string()];
  return table;
}

nlohmann::json to_json(const SignTestResult& r) {
  nlohmann::json j = {{"wins_a", r.wins_a},
                      {"wins_b", r.wins_b},
                      {"ties", r.ties},
                      {"n_effective", r.n_effective},
                      {"p_value_two_sided", r.p_value},
                      {"alpha", r.alpha},
                      {"decision", to_string(r.decision)},
                      {"critical_value", nullptr},
                      {"critical_decision", nullptr}};
  if (r.critical_value) j["critical_value"] = *r.critical_value;
  if (r.critical_decision) j["critical_decision"] = to_string(*r.critical_decision);
  return j;
}

nlohmann::json to_json(const BoxplotSummary& s) {
  nlohmann::json outliers = nlohmann::json::array();
  for (const auto& o : s.outliers) outliers.push_back({{"score", o.score}, {"params", o.params}});
  return {{"min", s.min},
          {"q1", s.q1},
          {"median", s.median},
          {"q3", s.q3},
          {"max", s.max},
          {"iqr", s.iqr},
          {"lower_fence", s.lower_fence},
          {"upper_fence", s.upper_fence},
          {"outliers", outliers},
          {"attribution", outlier_attribution(s)}};
}

void write_boxplot_csv(std::span<const ScoredConfig> values, const BoxplotSummary& summary, std::ostream& out) {
  std::vector<const ScoredConfig*> order;
  for (const auto& v : values) order.push_back(&v);
  std::sort(order.begin(), order.end(), [](const ScoredConfig* a, const ScoredConfig* b) { return scored_before(*b, *a); });
  csv::write_row(out, std::vector<std::string>{"score", "rank", "params", "is_outlier"});
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& v = *order[i];
    bool outlier = v.score < summary.lower_fence || v.score > summary.upper_fence;
    csv::write_row(out, std::vector<std::string>{fmt::format("{}", v.score), std::to_string(i + 1),
                                                 describe(v.params), outlier ? "1" : "0"});
  }
}

}  // namespace readmit
