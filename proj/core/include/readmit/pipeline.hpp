#pragma once

// Stage orchestration behind the readmit command-line tool. Each stage reads
// the previous stage's output under RunConfig::out and writes its own
// subdirectory:
//
//   prepare/   encoded.csv, missing_profile.csv, manifest.json
//   balance/   balanced.csv, manifest.json
//   baseline/  baseline.csv, confusion_<variant>_<family>.csv, report.json
//   tune/      <family>_grid.csv, <family>_boxplot.csv, <family>.json, tuning.csv, report.json
//   compare/   folds.csv, report.json
//
// Every stage also writes volatile.json (wall times); all other files are
// byte-identical across runs with the same config.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "readmit/error.hpp"
#include "readmit/learners.hpp"

namespace readmit {

enum class Scope { full, train_only };

std::string_view to_string(Scope s);
Scope parse_scope(std::string_view text);  // "full" or "train-only"

struct RunConfig {
  std::filesystem::path data;  // diabetic_data.csv
  std::filesystem::path ids;   // IDS_mapping.csv
  std::filesystem::path out = "readmit-out";
  std::uint64_t seed = 42;
  std::size_t threads = 1;

  bool include_meds = true;

  std::optional<std::size_t> target;
  std::size_t k_neighbors = 5;
  Scope balance_scope = Scope::full;

  double train_fraction = 0.8;
  bool ablation = false;  // baseline: also run without the medication columns

  std::vector<Family> families;  // tune: empty means every tunable family
  std::filesystem::path grid;    // tune: grid file overriding the builtin one
  std::size_t tune_folds = 5;
  std::optional<std::size_t> budget;
  Scope tune_scope = Scope::full;
  std::size_t summary_n = 10;

  std::size_t folds = 10;  // compare
  Family model_a = Family::gradient_boosting;
  Family model_b = Family::random_forest;
  // Inline JSON object, or "@path" to a params object or a tune result file
  // (its best configuration is used). Empty: family defaults.
  std::string params_a;
  std::string params_b;
  std::filesystem::path scores_file;  // compare: score table instead of training

  // Keys are the field names above; "out" is not echoed by to_json.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

// Failure inside a named stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what) : Error(what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct StageResult {
  std::filesystem::path dir;
  nlohmann::json manifest;
};

StageResult run_prepare(const RunConfig& config);
StageResult run_balance(const RunConfig& config);
StageResult run_baseline(const RunConfig& config);
StageResult run_tune(const RunConfig& config);
StageResult run_compare(const RunConfig& config);

// Reads a per-fold score table: one "<metric>_a" and "<metric>_b" column pair
// per metric (an optional "fold" column is ignored). Returns pairs in file order.
struct ScoreColumns {
  std::string metric;
  std::vector<double> a;
  std::vector<double> b;
};

std::vector<ScoreColumns> load_score_table(const std::filesystem::path& path);

}  // namespace readmit
