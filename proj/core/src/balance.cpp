#include "readmit/balance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "readmit/error.hpp"
#include "readmit/parallel.hpp"
#include "readmit/rng.hpp"

namespace readmit {

std::string_view to_string(Provenance p) { return p == Provenance::original ? "original" : "synthetic"; }

std::vector<std::string> BalancedDataset::provenance_labels() const {
  std::vector<std::string> out;
  out.reserve(provenance.size());
  for (Provenance p : provenance) out.emplace_back(to_string(p));
  return out;
}

namespace {

std::vector<std::vector<std::size_t>> rows_by_class(const FeatureMatrix& m) {
  std::vector<std::vector<std::size_t>> out(kClassCount);
  for (std::size_t i = 0; i < m.labels.size(); ++i) out[static_cast<std::size_t>(m.labels[i])].push_back(i);
  return out;
}

// Uniform subset of `rows` of size `keep`, returned in ascending order.
std::vector<std::size_t> sample_subset(std::vector<std::size_t> rows, std::size_t keep, Rng& rng) {
  for (std::size_t i = 0; i < keep; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(rows.size() - i));
    std::swap(rows[i], rows[j]);
  }
  rows.resize(keep);
  std::sort(rows.begin(), rows.end());
  return rows;
}

}  // namespace

FeatureMatrix undersample_majority(const FeatureMatrix& m, const BalanceConfig& cfg) {
  auto by_class = rows_by_class(m);
  const std::size_t target = by_class[1].size();
  if (target == 0) throw DomainError("cannot undersample: class '>30' is empty");

  Rng rng(derive_seed(cfg.seed, "undersample"));
  std::vector<std::size_t> keep_no =
      by_class[0].size() > target ? sample_subset(by_class[0], target, rng) : by_class[0];

  std::vector<std::size_t> rows;
  rows.reserve(keep_no.size() + by_class[1].size() + by_class[2].size());
  rows.insert(rows.end(), keep_no.begin(), keep_no.end());
  rows.insert(rows.end(), by_class[1].begin(), by_class[1].end());
  rows.insert(rows.end(), by_class[2].begin(), by_class[2].end());
  std::sort(rows.begin(), rows.end());
  return m.select(rows);
}

FeatureMatrix cap_classes(const FeatureMatrix& m, std::size_t target, std::uint64_t seed) {
  auto by_class = rows_by_class(m);
  std::vector<std::size_t> rows;
  for (std::size_t k = 0; k < kClassCount; ++k) {
    Rng rng(derive_seed(seed, "cap_class", k));
    auto kept = by_class[k].size() > target ? sample_subset(by_class[k], target, rng) : by_class[k];
    rows.insert(rows.end(), kept.begin(), kept.end());
  }
  std::sort(rows.begin(), rows.end());
  return m.select(rows);
}

std::vector<double> interpolate(std::span<const double> a, std::span<const double> b, double u) {
  if (a.size() != b.size()) throw DomainError("interpolate: width mismatch");
  std::vector<double> out(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] + u * (b[j] - a[j]);
  return out;
}

std::vector<std::vector<std::size_t>> nearest_neighbors(const Matrix& x, std::span<const std::size_t> members,
                                                        std::size_t k, std::size_t threads) {
  const std::size_t n = members.size();
  const std::size_t k_eff = std::min(k, n == 0 ? 0 : n - 1);
  std::vector<std::vector<std::size_t>> out(n);

  parallel_for(n, threads, [&](std::size_t qi) {
    auto q = x.row(members[qi]);
    std::vector<std::pair<double, std::size_t>> cand;
    cand.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == qi) continue;
      auto r = x.row(members[j]);
      double d = 0;
      for (std::size_t c = 0; c < q.size(); ++c) {
        double diff = q[c] - r[c];
        d += diff * diff;
      }
      cand.emplace_back(d, members[j]);
    }
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k_eff), cand.end());
    out[qi].reserve(k_eff);
    for (std::size_t i = 0; i < k_eff; ++i) out[qi].push_back(cand[i].second);
  });
  return out;
}

BalancedDataset smote(const FeatureMatrix& m, const BalanceConfig& cfg) {
  if (cfg.k_neighbors < 1) throw DomainError("smote: k_neighbors must be >= 1");
  auto by_class = rows_by_class(m);
  const std::size_t target = cfg.target_per_class.value_or(by_class[1].size());
  for (std::size_t k = 0; k < kClassCount; ++k) {
    if (by_class[k].size() > target)
      throw DomainError(fmt::format("smote: class '{}' has {} rows, above the target of {}", kClassNames[k],
                                    by_class[k].size(), target));
    if (by_class[k].size() == 1 && target > 1)
      throw DomainError(fmt::format("smote: class '{}' has {} row(s); at least 2 are needed to find a neighbor",
                                    kClassNames[k], by_class[k].size()));
  }

  BalancedDataset out;
  out.data = m;
  out.provenance.assign(m.n_rows(), Provenance::original);
  out.parents.assign(m.n_rows(), std::nullopt);

  Rng rng(derive_seed(cfg.seed, "smote"));
  for (std::size_t k = 0; k < kClassCount; ++k) {
    const auto& members = by_class[k];
    if (members.empty() || members.size() >= target) continue;
    auto neighbors = nearest_neighbors(m.x, members, cfg.k_neighbors, cfg.threads);
    const std::size_t needed = target - members.size();
    out.data.x.reserve_rows(out.data.n_rows() + needed);
    for (std::size_t s = 0; s < needed; ++s) {
      std::size_t qi = static_cast<std::size_t>(rng.uniform_index(members.size()));
      const auto& nb = neighbors[qi];
      std::size_t other = nb[static_cast<std::size_t>(rng.uniform_index(nb.size()))];
      double u = rng.uniform01();
      auto row = interpolate(m.x.row(members[qi]), m.x.row(other), u);
      out.data.x.append_row(row);
      out.data.labels.push_back(static_cast<int>(k));
      out.provenance.push_back(Provenance::synthetic);
      out.parents.push_back(SyntheticParents{members[qi], other});
    }
  }
  return out;
}

ConvexityReport verify_convexity(const BalancedDataset& d, double rel_tol) {
  ConvexityReport report;
  const Matrix& x = d.data.x;
  auto fail = [&](std::size_t i) {
    ++report.failures;
    if (!report.first_failure) report.first_failure = i;
  };

  for (std::size_t i = 0; i < d.data.n_rows(); ++i) {
    if (d.provenance[i] != Provenance::synthetic) continue;
    ++report.checked;
    const auto& parents = d.parents[i];
    if (!parents || parents->base >= d.data.n_rows() || parents->neighbor >= d.data.n_rows() ||
        d.provenance[parents->base] != Provenance::original ||
        d.provenance[parents->neighbor] != Provenance::original ||
        d.data.labels[parents->base] != d.data.labels[i] || d.data.labels[parents->neighbor] != d.data.labels[i]) {
      fail(i);
      continue;
    }
    auto s = x.row(i);
    auto a = x.row(parents->base);
    auto b = x.row(parents->neighbor);

    // Weight from the widest coordinate, then checked against every coordinate.
    std::size_t widest = 0;
    double span_max = 0;
    for (std::size_t j = 0; j < s.size(); ++j) {
      double w = std::abs(b[j] - a[j]);
      if (w > span_max) {
        span_max = w;
        widest = j;
      }
    }
    double u = span_max > 0 ? (s[widest] - a[widest]) / (b[widest] - a[widest]) : 0.0;
    bool ok = u >= -rel_tol && u <= 1 + rel_tol;
    for (std::size_t j = 0; ok && j < s.size(); ++j) {
      double scale = std::max({1.0, std::abs(a[j]), std::abs(b[j])});
      if (std::abs(s[j] - (a[j] + u * (b[j] - a[j]))) > rel_tol * scale) ok = false;
    }
    if (!ok) fail(i);
  }
  return report;
}

}  // namespace readmit
