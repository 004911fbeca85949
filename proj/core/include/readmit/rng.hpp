#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace readmit {

// Seeded generator with portable draws: mt19937_64 output is fixed by the
// standard, and the bounded/real conversions below are ours, so streams are
// identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n);

  // Uniform real in [0, 1) with 53 random bits.
  double uniform01();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_index(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Named seed derivation: every random stream in the toolkit is
// derive_seed(master, stage_name, index).
std::uint64_t derive_seed(std::uint64_t master, std::string_view name, std::uint64_t index = 0);

}  // namespace readmit
