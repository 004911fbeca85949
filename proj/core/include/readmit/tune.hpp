#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "readmit/evaluate.hpp"
#include "readmit/learners.hpp"
#include "readmit/params.hpp"

namespace readmit {

struct ParamAxis {
  std::string name;
  std::vector<ParamValue> values;
};

// Cartesian grid. Configurations are enumerated with the first axis varying
// slowest.
struct ParamGrid {
  Family family = Family::gradient_boosting;
  std::vector<ParamAxis> axes;

  std::size_t size() const;
  ParamMap config(std::size_t index) const;
};

// Throws DomainError for naive_bayes, which has no tunable grid.
ParamGrid builtin_grid(Family family);

// {"family": "...", "axes": {"name": [values...], ...}} or, as written by
// to_json, "axes": [{"name": ..., "values": [...]}, ...]. Axis order follows
// the document. Every value is validated against the family.
ParamGrid grid_from_json(const nlohmann::ordered_json& j);
ParamGrid load_grid(const std::filesystem::path& path);
nlohmann::json to_json(const ParamGrid& grid);

// Indices of the configurations evaluated under a budget: all of them when
// budget >= size, otherwise floor(i * size / budget) for i < budget.
std::vector<std::size_t> budget_indices(std::size_t size, std::optional<std::size_t> budget);

struct GridSearchOptions {
  std::size_t k = 5;
  std::uint64_t seed = 0;
  bool stratified = true;
  std::optional<std::size_t> budget;  // maximum number of configurations
  std::size_t threads = 1;
};

struct GridRow {
  std::size_t config_index = 0;  // position in the full grid
  ParamMap params;
  std::vector<double> fold_accuracies;
  double mean_accuracy = 0.0;
  std::size_t rank = 0;  // 1 = best
  double wall_time_s = 0.0;
};

struct GridSearchResult {
  Family family = Family::gradient_boosting;
  std::vector<ParamAxis> axes;
  std::size_t grid_size = 0;
  std::size_t k = 0;
  std::vector<GridRow> rows;  // evaluation order

  std::vector<const GridRow*> ranked() const;
  const GridRow& best() const;
};

// One fold plan (built from options.seed) is shared by every configuration;
// configuration i uses learner seed derive_seed(options.seed, "config", i).
// Ranking is by mean accuracy, descending; ties go to the configuration whose
// values are smaller, compared axis by axis.
GridSearchResult grid_search(const ParamGrid& grid, const FeatureMatrix& m, const GridSearchOptions& options);

struct AxisSummary {
  std::string name;
  bool numeric = true;
  double top_mean = 0.0;
  double top_std = 0.0;  // population standard deviation
  double bottom_mean = 0.0;
  double bottom_std = 0.0;
  std::map<std::string, std::size_t> top_frequency;  // keyword-valued axes
  std::map<std::string, std::size_t> bottom_frequency;
};

struct ParamSummary {
  std::size_t n = 0;
  std::vector<AxisSummary> axes;
};

// Top-n and bottom-n ranked configurations per axis. Axes whose values are all
// numbers get mean and std; the others get frequency tables.
ParamSummary summarize(const GridSearchResult& result, std::size_t n = 10);

enum class Significance { significant, insignificant };

std::string_view to_string(Significance s);

// Significant when the accuracies differ by more than one percentage point.
Significance significance(double before, double after);

void write_grid_csv(const GridSearchResult& result, std::ostream& out);
nlohmann::json to_json(const GridSearchResult& result);
nlohmann::json to_json(const ParamSummary& summary);

}  // namespace readmit
