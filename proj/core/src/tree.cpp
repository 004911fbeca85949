#include "readmit/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "readmit/error.hpp"

namespace readmit {

std::size_t DecisionTree::leaf_index(std::span<const double> row) const {
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    const TreeNode& n = nodes[i];
    i = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return i;
}

std::size_t DecisionTree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<std::size_t> d(nodes.size(), 0);
  std::size_t best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    best = std::max(best, d[i]);
    if (nodes[i].feature >= 0) {
      d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
    }
  }
  return best;
}

SortedColumns::SortedColumns(const Matrix& x) : ranks_(x.cols()), distinct_(x.cols()) {
  std::vector<std::pair<double, std::uint32_t>> col(x.rows());
  for (std::size_t f = 0; f < x.cols(); ++f) {
    for (std::size_t r = 0; r < x.rows(); ++r) col[r] = {x(r, f), static_cast<std::uint32_t>(r)};
    std::sort(col.begin(), col.end());
    auto& ranks = ranks_[f];
    auto& values = distinct_[f];
    ranks.resize(x.rows());
    for (std::size_t i = 0; i < col.size(); ++i) {
      if (values.empty() || col[i].first != values.back()) values.push_back(col[i].first);
      ranks[col[i].second] = static_cast<std::uint32_t>(values.size() - 1);
    }
  }
}

std::size_t auto_max_features(std::size_t n_features) {
  auto k = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n_features))));
  return std::max<std::size_t>(1, k);
}

namespace {

// Node statistics for Gini classification.
struct ClassStats {
  std::array<double, kClassCount> counts{};
  double n = 0;

  void add(int label) {
    counts[static_cast<std::size_t>(label)] += 1;
    n += 1;
  }
  void add(const ClassStats& o) {
    for (std::size_t k = 0; k < kClassCount; ++k) counts[k] += o.counts[k];
    n += o.n;
  }
  ClassStats minus(const ClassStats& o) const {
    ClassStats r;
    for (std::size_t k = 0; k < kClassCount; ++k) r.counts[k] = counts[k] - o.counts[k];
    r.n = n - o.n;
    return r;
  }
  // n * (1 - gini); maximizing the children's sum minimizes weighted Gini.
  double proxy() const {
    if (n <= 0) return 0;
    double s = 0;
    for (double c : counts) s += c * c;
    return s / n;
  }
  bool pure() const {
    int nonzero = 0;
    for (double c : counts) nonzero += c > 0;
    return nonzero <= 1;
  }
  double leaf_value() const {
    return static_cast<double>(argmax(counts));
  }
};

// Node statistics for least squares.
struct SquaredStats {
  double sum = 0;
  double n = 0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    sum += v;
    n += 1;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void add(const SquaredStats& o) {
    sum += o.sum;
    n += o.n;
    lo = std::min(lo, o.lo);
    hi = std::max(hi, o.hi);
  }
  SquaredStats minus(const SquaredStats& o) const {
    SquaredStats r;
    r.sum = sum - o.sum;
    r.n = n - o.n;
    return r;
  }
  double proxy() const { return n <= 0 ? 0 : sum * sum / n; }
  bool pure() const { return hi - lo <= 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi))); }
  double leaf_value() const { return n > 0 ? sum / n : 0.0; }
};

struct Split {
  std::size_t feature = 0;
  std::uint32_t left_max_rank = 0;  // rows with rank <= this go left
  double threshold = 0;
  double score = -std::numeric_limits<double>::infinity();
};

template <typename Stats, typename Target>
class TreeGrower {
 public:
  TreeGrower(const SortedColumns& cols, Target target, const TreeParams& params, Rng& rng)
      : cols_(cols), target_(target), params_(params), rng_(rng) {
    std::size_t max_distinct = 0;
    for (std::size_t f = 0; f < cols.n_features(); ++f) max_distinct = std::max(max_distinct, cols.distinct(f).size());
    buckets_.resize(max_distinct);
    touched_.reserve(max_distinct);
    feature_order_.resize(cols.n_features());
  }

  DecisionTree grow(std::span<const std::size_t> samples) {
    samples_.assign(samples.begin(), samples.end());
    DecisionTree tree;
    if (samples_.empty()) throw DomainError("cannot grow a tree on zero samples");

    struct Pending {
      std::size_t node, begin, end, depth;
    };
    std::vector<Pending> stack;
    tree.nodes.emplace_back();
    stack.push_back({0, 0, samples_.size(), 0});

    while (!stack.empty()) {
      Pending p = stack.back();
      stack.pop_back();
      Stats stats = node_stats(p.begin, p.end);
      tree.nodes[p.node].value = stats.leaf_value();

      const std::size_t m = p.end - p.begin;
      bool leaf = stats.pure() || m < params_.min_samples_split || m < 2 * params_.min_samples_leaf ||
                  (params_.max_depth && p.depth >= *params_.max_depth);
      if (leaf) continue;

      auto split = find_split(p.begin, p.end, stats);
      if (!split) continue;

      auto first = samples_.begin() + static_cast<std::ptrdiff_t>(p.begin);
      auto last = samples_.begin() + static_cast<std::ptrdiff_t>(p.end);
      auto mid = std::stable_partition(first, last, [&](std::size_t s) {
        return cols_.rank(s, split->feature) <= split->left_max_rank;
      });
      std::size_t mid_pos = static_cast<std::size_t>(mid - samples_.begin());

      auto left = static_cast<std::int32_t>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      TreeNode& node = tree.nodes[p.node];
      node.feature = static_cast<std::int32_t>(split->feature);
      node.threshold = split->threshold;
      node.left = left;
      node.right = left + 1;
      // Right child pushed first so the left subtree is expanded first.
      stack.push_back({static_cast<std::size_t>(left + 1), mid_pos, p.end, p.depth + 1});
      stack.push_back({static_cast<std::size_t>(left), p.begin, mid_pos, p.depth + 1});
    }
    return tree;
  }

 private:
  Stats node_stats(std::size_t begin, std::size_t end) const {
    Stats s;
    for (std::size_t i = begin; i < end; ++i) s.add(target_[samples_[i]]);
    return s;
  }

  std::optional<Split> find_split(std::size_t begin, std::size_t end, const Stats& parent) {
    const std::size_t p = cols_.n_features();
    const std::size_t wanted = params_.max_features ? std::min(*params_.max_features, p) : p;
    const bool subsample = wanted < p;
    std::iota(feature_order_.begin(), feature_order_.end(), 0);

    Split best;
    bool found = false;
    std::size_t informative = 0;
    // Features are drawn without replacement; constant ones do not count
    // toward max_features, and drawing stops once enough have been searched.
    for (std::size_t i = 0; i < p && informative < wanted; ++i) {
      if (subsample) {
        std::size_t j = i + static_cast<std::size_t>(rng_.uniform_index(p - i));
        std::swap(feature_order_[i], feature_order_[j]);
      }
      std::size_t f = feature_order_[i];
      int status = search_feature(f, begin, end, parent, best);
      if (status >= 0) ++informative;
      if (status > 0) found = true;
    }
    if (!found) return std::nullopt;
    return best;
  }

  // -1: constant in node; 0: searched, no admissible split; 1: improved `best`.
  int search_feature(std::size_t f, std::size_t begin, std::size_t end, const Stats& parent, Split& best) {
    const std::size_t m = end - begin;
    const auto distinct = cols_.distinct(f);
    sorted_.clear();

    if (distinct.size() <= 2 * m) {
      touched_.clear();
      for (std::size_t i = begin; i < end; ++i) {
        std::uint32_t r = cols_.rank(samples_[i], f);
        Stats& b = buckets_[r];
        if (b.n == 0) touched_.push_back(r);
        b.add(target_[samples_[i]]);
      }
      if (touched_.size() < 2) {
        for (std::uint32_t r : touched_) buckets_[r] = Stats{};
        return -1;
      }
      std::sort(touched_.begin(), touched_.end());
      int status = sweep(f, parent, best, touched_.size(), [&](std::size_t i) -> std::pair<std::uint32_t, const Stats&> {
        return {touched_[i], buckets_[touched_[i]]};
      });
      for (std::uint32_t r : touched_) buckets_[r] = Stats{};
      return status;
    }

    for (std::size_t i = begin; i < end; ++i) sorted_.emplace_back(cols_.rank(samples_[i], f), samples_[i]);
    std::sort(sorted_.begin(), sorted_.end());
    // Collapse equal ranks into groups.
    groups_.clear();
    for (const auto& [r, s] : sorted_) {
      if (groups_.empty() || groups_.back().first != r) groups_.emplace_back(r, Stats{});
      groups_.back().second.add(target_[s]);
    }
    if (groups_.size() < 2) return -1;
    return sweep(f, parent, best, groups_.size(), [&](std::size_t i) -> std::pair<std::uint32_t, const Stats&> {
      return {groups_[i].first, groups_[i].second};
    });
  }

  template <typename GroupAt>
  int sweep(std::size_t f, const Stats& parent, Split& best, std::size_t n_groups, GroupAt group_at) {
    const auto distinct = cols_.distinct(f);
    const double min_leaf = static_cast<double>(params_.min_samples_leaf);
    Stats left;
    int status = 0;
    for (std::size_t g = 0; g + 1 < n_groups; ++g) {
      auto [rank, stats] = group_at(g);
      left.add(stats);
      Stats right = parent.minus(left);
      if (left.n < min_leaf || right.n < min_leaf) continue;
      double score = left.proxy() + right.proxy();
      if (score > best.score) {
        std::uint32_t next_rank = group_at(g + 1).first;
        double lo = distinct[rank];
        double hi = distinct[next_rank];
        double threshold = lo + (hi - lo) / 2.0;
        if (threshold >= hi || threshold < lo) threshold = lo;
        best = Split{f, rank, threshold, score};
        status = 1;
      }
    }
    return status;
  }

  const SortedColumns& cols_;
  Target target_;
  const TreeParams& params_;
  Rng& rng_;
  std::vector<std::size_t> samples_;
  std::vector<Stats> buckets_;
  std::vector<std::uint32_t> touched_;
  std::vector<std::pair<std::uint32_t, std::size_t>> sorted_;
  std::vector<std::pair<std::uint32_t, Stats>> groups_;
  std::vector<std::size_t> feature_order_;
};

void check_params(const TreeParams& params) {
  if (params.min_samples_split < 2) throw DomainError("min_samples_split must be >= 2");
  if (params.min_samples_leaf < 1) throw DomainError("min_samples_leaf must be >= 1");
  if (params.max_features && *params.max_features < 1) throw DomainError("max_features must be >= 1");
}

}  // namespace

DecisionTree grow_classification_tree(const SortedColumns& cols, std::span<const int> labels,
                                      std::span<const std::size_t> samples, const TreeParams& params, Rng& rng) {
  check_params(params);
  TreeGrower<ClassStats, std::span<const int>> grower(cols, labels, params, rng);
  return grower.grow(samples);
}

DecisionTree grow_regression_tree(const SortedColumns& cols, std::span<const double> target,
                                  std::span<const std::size_t> samples, const TreeParams& params, Rng& rng) {
  check_params(params);
  TreeGrower<SquaredStats, std::span<const double>> grower(cols, target, params, rng);
  return grower.grow(samples);
}

int argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return static_cast<int>(best);
}

}  // namespace readmit
