#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "readmit/features.hpp"

namespace readmit {

struct BalanceConfig {
  std::uint64_t seed = 0;
  std::size_t k_neighbors = 5;
  // nullopt = "auto": the size of class ">30".
  std::optional<std::size_t> target_per_class;
  std::size_t threads = 1;
};

enum class Provenance : std::uint8_t { original, synthetic };

std::string_view to_string(Provenance p);

// Rows of a synthetic sample's parents, as indices into the balanced matrix.
struct SyntheticParents {
  std::size_t base = 0;
  std::size_t neighbor = 0;
};

// Originals first (input order), then synthetic rows in generation order.
struct BalancedDataset {
  FeatureMatrix data;
  std::vector<Provenance> provenance;
  std::vector<std::optional<SyntheticParents>> parents;

  std::vector<std::string> provenance_labels() const;
};

// Keeps every ">30" row and an equally sized uniform random subset of "NO";
// "<30" is untouched. Surviving rows keep their input order.
FeatureMatrix undersample_majority(const FeatureMatrix& m, const BalanceConfig& cfg);

// Uniform random subset of each class larger than `target`, down to `target`.
FeatureMatrix cap_classes(const FeatureMatrix& m, std::size_t target, std::uint64_t seed);

// Oversamples every class below the target with SMOTE until all classes hold
// exactly target_per_class rows. Empty classes stay empty.
BalancedDataset smote(const FeatureMatrix& m, const BalanceConfig& cfg);

// a + u * (b - a)
std::vector<double> interpolate(std::span<const double> a, std::span<const double> b, double u);

// Indices of the k nearest rows (Euclidean, ties to the lower index) among
// `members`, excluding the query itself. Returned per member, in member order.
std::vector<std::vector<std::size_t>> nearest_neighbors(const Matrix& x, std::span<const std::size_t> members,
                                                        std::size_t k, std::size_t threads = 1);

struct ConvexityReport {
  std::size_t checked = 0;
  std::size_t failures = 0;
  std::optional<std::size_t> first_failure;

  bool ok() const noexcept { return failures == 0; }
};

// Re-derives the interpolation weight of every synthetic row from its data and
// checks that one weight in [0, 1] reproduces all coordinates and that both
// parents are original rows of the same class.
ConvexityReport verify_convexity(const BalancedDataset& d, double rel_tol = 1e-9);

}  // namespace readmit
