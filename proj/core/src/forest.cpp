#include "readmit/models.hpp"

#include <numeric>

#include "readmit/error.hpp"
#include "readmit/parallel.hpp"

namespace readmit {

ForestModel fit_forest(const Matrix& x, std::span<const int> labels, const ForestParams& params, std::uint64_t seed,
                       std::size_t threads) {
  if (x.rows() == 0) throw DomainError("random_forest: empty training data");
  if (params.n_estimators < 1) throw DomainError("random_forest: n_estimators must be >= 1");
  const SortedColumns cols(x);
  const std::size_t n = x.rows();

  ForestModel model;
  model.trees.resize(params.n_estimators);
  parallel_for(params.n_estimators, threads, [&](std::size_t t) {
    Rng rng(derive_seed(seed, "tree", t));
    std::vector<std::size_t> samples(n);
    if (params.bootstrap) {
      for (auto& s : samples) s = static_cast<std::size_t>(rng.uniform_index(n));
    } else {
      std::iota(samples.begin(), samples.end(), 0);
    }
    model.trees[t] = grow_classification_tree(cols, labels, samples, params.tree, rng);
  });
  return model;
}

int ForestModel::predict(std::span<const double> row) const {
  std::array<double, kClassCount> votes{};
  for (const auto& t : trees) votes[static_cast<std::size_t>(t.value(row))] += 1;
  return argmax(votes);
}

}  // namespace readmit
