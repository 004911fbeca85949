#include "readmit/tune.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <fmt/format.h>

#include "readmit/csv.hpp"
#include "readmit/error.hpp"
#include "readmit/parallel.hpp"
#include "readmit/rng.hpp"

namespace readmit {

std::size_t ParamGrid::size() const {
  if (axes.empty()) return 0;
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.values.size();
  return n;
}

ParamMap ParamGrid::config(std::size_t index) const {
  if (index >= size()) throw DomainError(fmt::format("configuration {} is outside a grid of {}", index, size()));
  ParamMap out;
  for (std::size_t a = axes.size(); a-- > 0;) {
    const auto& axis = axes[a];
    out[axis.name] = axis.values[index % axis.values.size()];
    index /= axis.values.size();
  }
  return out;
}

ParamGrid builtin_grid(Family family) {
  ParamGrid g;
  g.family = family;
  switch (family) {
    case Family::naive_bayes:
      throw DomainError("naive_bayes has no tunable grid");
    case Family::gradient_boosting:
      g.axes = {{"learning_rate", {1.0, 0.5, 0.1}},
                {"n_estimators", {50, 100, 150}},
                {"max_depth", {1, 2, 3, 4, 5, 6}}};
      break;
    case Family::random_forest:
      g.axes = {{"n_estimators", {100, 200, 500}},
                {"max_depth", {6, 10, 20}},
                {"min_samples_split", {2, 3, 4}},
                {"max_features", {5, 61, "auto"}}};
      break;
    case Family::decision_tree:
      g.axes = {{"max_depth", {2, 5, 10, "none"}},
                {"min_samples_split", {2, 3, 4, 5}},
                {"min_samples_leaf", {1, 2, 3}},
                {"max_features", {10, 30, 61, "auto"}}};
      break;
    case Family::logistic_regression: {
      ParamAxis c{"C", {}};
      for (int i = 0; i < 15; ++i) c.values.emplace_back(std::pow(10.0, -4.0 + 8.0 * i / 14.0));
      c.values.front() = 1e-4;
      c.values.back() = 1e4;
      g.axes = {c, {"max_iter", {5000, 10000, 20000, 30000}}};
      break;
    }
    case Family::svm:
      g.axes = {{"C", {0.1, 1.0, 10.0, 100.0}}};
      break;
  }
  return g;
}

namespace {

ParamAxis parse_axis(Family family, const std::string& name, const nlohmann::json& values) {
  if (!values.is_array() || values.empty())
    throw DomainError(fmt::format("grid axis '{}' must be a non-empty array", name));
  ParamAxis axis{name, {}};
  for (const auto& v : values) {
    ParamValue pv = v.get<ParamValue>();
    resolve_params(family, ParamMap{{name, pv}});
    axis.values.push_back(pv);
  }
  return axis;
}

}  // namespace

ParamGrid grid_from_json(const nlohmann::ordered_json& j) {
  ParamGrid g;
  g.family = parse_family(j.at("family").get<std::string>());
  const auto& axes = j.at("axes");
  if (axes.empty()) throw DomainError("grid 'axes' must not be empty");
  if (axes.is_object()) {
    for (const auto& [name, values] : axes.items())
      g.axes.push_back(parse_axis(g.family, name, nlohmann::json::parse(values.dump())));
  } else if (axes.is_array()) {
    for (const auto& a : axes)
      g.axes.push_back(
          parse_axis(g.family, a.at("name").get<std::string>(), nlohmann::json::parse(a.at("values").dump())));
  } else {
    throw DomainError("grid 'axes' must be an object or an array");
  }
  return g;
}

ParamGrid load_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open grid file '" + path.string() + "'");
  return grid_from_json(nlohmann::ordered_json::parse(in));
}

nlohmann::json to_json(const ParamGrid& grid) {
  nlohmann::json axes = nlohmann::json::array();
  for (const auto& a : grid.axes) axes.push_back({{"name", a.name}, {"values", a.values}});
  return {{"family", to_string(grid.family)}, {"axes", axes}};
}

std::vector<std::size_t> budget_indices(std::size_t size, std::optional<std::size_t> budget) {
  std::size_t n = budget ? std::min(*budget, size) : size;
  if (budget && *budget == 0) throw DomainError("budget must be at least 1");
  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = i * size / n;
  return out;
}

namespace {

bool params_before(const std::vector<ParamAxis>& axes, const ParamMap& a, const ParamMap& b) {
  for (const auto& axis : axes) {
    auto c = a.at(axis.name) <=> b.at(axis.name);
    if (c != 0) return c < 0;
  }
  return false;
}

}  // namespace

std::vector<const GridRow*> GridSearchResult::ranked() const {
  std::vector<const GridRow*> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(&r);
  std::sort(out.begin(), out.end(), [](const GridRow* a, const GridRow* b) { return a->rank < b->rank; });
  return out;
}

const GridRow& GridSearchResult::best() const {
  for (const auto& r : rows)
    if (r.rank == 1) return r;
  throw DomainError("empty grid search result");
}

GridSearchResult grid_search(const ParamGrid& grid, const FeatureMatrix& m, const GridSearchOptions& options) {
  if (grid.size() == 0) throw DomainError("grid is empty");
  if (grid.family == Family::naive_bayes) throw DomainError("naive_bayes has no tunable grid");

  FoldPlan plan = make_fold_plan(m.labels, options.k, options.seed, options.stratified);
  std::vector<std::size_t> chosen = budget_indices(grid.size(), options.budget);

  GridSearchResult result;
  result.family = grid.family;
  result.axes = grid.axes;
  result.grid_size = grid.size();
  result.k = options.k;
  result.rows.resize(chosen.size());

  parallel_for(chosen.size(), options.threads, [&](std::size_t i) {
    GridRow& row = result.rows[i];
    row.config_index = chosen[i];
    row.params = grid.config(chosen[i]);
    LearnerSpec spec{grid.family, row.params, derive_seed(options.seed, "config", chosen[i]), 1};
    CvResult cv;
    try {
      cv = cross_validate(spec, m, plan);
    } catch (const Error& e) {
      throw DomainError(fmt::format("{} with {}: {}", to_string(grid.family), describe(row.params), e.what()));
    }
    for (const auto& f : cv.folds) row.fold_accuracies.push_back(f.accuracy);
    row.mean_accuracy = cv.mean.accuracy;
    row.wall_time_s = cv.mean.wall_time_s * static_cast<double>(cv.folds.size());
  });

  std::vector<std::size_t> order(result.rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const GridRow& x = result.rows[a];
    const GridRow& y = result.rows[b];
    if (x.mean_accuracy != y.mean_accuracy) return x.mean_accuracy > y.mean_accuracy;
    return params_before(result.axes, x.params, y.params);
  });
  for (std::size_t r = 0; r < order.size(); ++r) result.rows[order[r]].rank = r + 1;
  return result;
}

ParamSummary summarize(const GridSearchResult& result, std::size_t n) {
  const std::size_t total = result.rows.size();
  if (n == 0) throw DomainError("summary size must be at least 1");
  if (total < 2 * n)
    throw DomainError(fmt::format("cannot summarize top and bottom {} of {} configurations", n, total));

  auto ranked = result.ranked();
  std::vector<const GridRow*> top(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(n));
  std::vector<const GridRow*> bottom(ranked.end() - static_cast<std::ptrdiff_t>(n), ranked.end());

  ParamSummary s;
  s.n = n;
  for (const auto& axis : result.axes) {
    AxisSummary a;
    a.name = axis.name;
    a.numeric = std::all_of(axis.values.begin(), axis.values.end(), [](const ParamValue& v) { return v.is_number(); });
    auto stats = [&](const std::vector<const GridRow*>& rows, double& mean, double& sd) {
      double sum = 0.0;
      for (const auto* r : rows) sum += r->params.at(axis.name).number();
      mean = sum / static_cast<double>(rows.size());
      double ss = 0.0;
      for (const auto* r : rows) {
        double d = r->params.at(axis.name).number() - mean;
        ss += d * d;
      }
      sd = std::sqrt(ss / static_cast<double>(rows.size()));
    };
    auto freq = [&](const std::vector<const GridRow*>& rows, std::map<std::string, std::size_t>& table) {
      for (const auto* r : rows) ++table[r->params.at(axis.name).to_string()];
    };
    if (a.numeric) {
      stats(top, a.top_mean, a.top_std);
      stats(bottom, a.bottom_mean, a.bottom_std);
    } else {
      freq(top, a.top_frequency);
      freq(bottom, a.bottom_frequency);
    }
    s.axes.push_back(std::move(a));
  }
  return s;
}

std::string_view to_string(Significance s) {
  return s == Significance::significant ? "significant" : "insignificant";
}

Significance significance(double before, double after) {
  if (!(before >= 0.0 && before <= 1.0 && after >= 0.0 && after <= 1.0))
    throw DomainError(fmt::format("accuracies must lie in [0, 1] (got {} and {})", before, after));
  return std::abs(after - before) > 0.01 ? Significance::significant : Significance::insignificant;
}

void write_grid_csv(const GridSearchResult& result, std::ostream& out) {
  std::vector<std::string> header{"config"};
  for (const auto& a : result.axes) header.push_back(a.name);
  for (std::size_t f = 0; f < result.k; ++f) header.push_back(fmt::format("fold_{}", f + 1));
  header.insert(header.end(), {"mean_accuracy", "rank"});
  csv::write_row(out, header);
  for (const auto& r : result.rows) {
    std::vector<std::string> row{std::to_string(r.config_index)};
    for (const auto& a : result.axes) row.push_back(r.params.at(a.name).to_string());
    for (double acc : r.fold_accuracies) row.push_back(fmt::format("{}", acc));
    row.push_back(fmt::format("{}", r.mean_accuracy));
    row.push_back(std::to_string(r.rank));
    csv::write_row(out, row);
  }
}

nlohmann::json to_json(const GridSearchResult& result) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto* r : result.ranked())
    rows.push_back({{"rank", r->rank},
                    {"config", r->config_index},
                    {"params", r->params},
                    {"fold_accuracies", r->fold_accuracies},
                    {"mean_accuracy", r->mean_accuracy}});
  ParamGrid grid{result.family, result.axes};
  return {{"family", to_string(result.family)},
          {"grid", to_json(grid)},
          {"grid_size", result.grid_size},
          {"evaluated", result.rows.size()},
          {"folds", result.k},
          {"best", result.best().params},
          {"best_mean_accuracy", result.best().mean_accuracy},
          {"ranked", rows}};
}

nlohmann::json to_json(const ParamSummary& summary) {
  nlohmann::json axes = nlohmann::json::array();
  for (const auto& a : summary.axes) {
    nlohmann::json j = {{"param", a.name}, {"numeric", a.numeric}};
    if (a.numeric) {
      j["top"] = {{"mean", a.top_mean}, {"std", a.top_std}};
      j["bottom"] = {{"mean", a.bottom_mean}, {"std", a.bottom_std}};
    } else {
      j["top"] = {{"frequency", a.top_frequency}};
      j["bottom"] = {{"frequency", a.bottom_frequency}};
    }
    axes.push_back(j);
  }
  return {{"n", summary.n}, {"axes", axes}};
}

}  // namespace readmit
