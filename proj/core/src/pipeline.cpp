#include "readmit/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include "readmit/balance.hpp"
#include "readmit/csv.hpp"
#include "readmit/evaluate.hpp"
#include "readmit/features.hpp"
#include "readmit/ingest.hpp"
#include "readmit/stats.hpp"
#include "readmit/tune.hpp"

namespace readmit {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Scope s) { return s == Scope::full ? "full" : "train-only"; }

Scope parse_scope(std::string_view text) {
  if (text == "full") return Scope::full;
  if (text == "train-only" || text == "train_only") return Scope::train_only;
  throw DomainError(fmt::format("unknown scope '{}' (expected full or train-only)", text));
}

// --- RunConfig ------------------------------------------------------------------

namespace {

std::size_t json_count(const json& v, std::string_view key) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    throw DomainError(fmt::format("config key '{}' must be a non-negative integer", key));
  return v.get<std::size_t>();
}

std::string params_text(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
  if (!j.is_object()) throw DomainError("config must be a JSON object");
  RunConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "data") c.data = v.get<std::string>();
    else if (key == "ids") c.ids = v.get<std::string>();
    else if (key == "out") c.out = v.get<std::string>();
    else if (key == "seed") c.seed = v.get<std::uint64_t>();
    else if (key == "threads") c.threads = json_count(v, key);
    else if (key == "include_meds") c.include_meds = v.get<bool>();
    else if (key == "target") {
      if (v.is_string() && v.get<std::string>() == "auto") c.target.reset();
      else c.target = json_count(v, key);
    } else if (key == "k_neighbors") c.k_neighbors = json_count(v, key);
    else if (key == "balance_scope") c.balance_scope = parse_scope(v.get<std::string>());
    else if (key == "train_fraction") c.train_fraction = v.get<double>();
    else if (key == "ablation") c.ablation = v.get<bool>();
    else if (key == "families") {
      c.families.clear();
      if (v.is_string()) c.families.push_back(parse_family(v.get<std::string>()));
      else
        for (const auto& f : v) c.families.push_back(parse_family(f.get<std::string>()));
    } else if (key == "grid") c.grid = v.get<std::string>();
    else if (key == "tune_folds") c.tune_folds = json_count(v, key);
    else if (key == "budget") {
      if (v.is_null()) c.budget.reset();
      else c.budget = json_count(v, key);
    } else if (key == "tune_scope") c.tune_scope = parse_scope(v.get<std::string>());
    else if (key == "summary_n") c.summary_n = json_count(v, key);
    else if (key == "folds") c.folds = json_count(v, key);
    else if (key == "model_a") c.model_a = parse_family(v.get<std::string>());
    else if (key == "model_b") c.model_b = parse_family(v.get<std::string>());
    else if (key == "params_a") c.params_a = params_text(v);
    else if (key == "params_b") c.params_b = params_text(v);
    else if (key == "scores_file") c.scores_file = v.get<std::string>();
    else throw DomainError(fmt::format("unknown config key '{}'", key));
  }
  return c;
}

RunConfig RunConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path.string() + "'");
  try {
    return from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("config file '{}': {}", path.string(), e.what()));
  }
}

json RunConfig::to_json() const {
  json families_j = json::array();
  for (Family f : families) families_j.push_back(readmit::to_string(f));
  return {{"data", data.string()},
          {"ids", ids.string()},
          {"seed", seed},
          {"include_meds", include_meds},
          {"target", target ? json(*target) : json("auto")},
          {"k_neighbors", k_neighbors},
          {"balance_scope", readmit::to_string(balance_scope)},
          {"train_fraction", train_fraction},
          {"ablation", ablation},
          {"families", families_j},
          {"grid", grid.string()},
          {"tune_folds", tune_folds},
          {"budget", budget ? json(*budget) : json(nullptr)},
          {"tune_scope", readmit::to_string(tune_scope)},
          {"summary_n", summary_n},
          {"folds", folds},
          {"model_a", readmit::to_string(model_a)},
          {"model_b", readmit::to_string(model_b)},
          {"params_a", params_a},
          {"params_b", params_b},
          {"scores_file", scores_file.string()}};
}

// --- Shared plumbing ----------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string utc_now() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(t));
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  return json::parse(in);
}

fs::path stage_dir(const RunConfig& c, std::string_view stage) {
  fs::path dir = c.out / std::string(stage);
  fs::create_directories(dir);
  return dir;
}

// Input produced by an earlier stage; its manifest must exist.
fs::path stage_input(const RunConfig& c, std::string_view producer, std::string_view file) {
  fs::path dir = c.out / std::string(producer);
  if (!fs::exists(dir / "manifest.json") || !fs::exists(dir / std::string(file)))
    throw Error(fmt::format("missing {} output in '{}'; run `{}` first", producer, dir.string(), producer));
  return dir / std::string(file);
}

json manifest_header(std::string_view stage, const RunConfig& c) {
  return {{"stage", stage}, {"seed", c.seed}, {"config", c.to_json()}};
}

void write_volatile(const fs::path& dir, std::string_view stage, double seconds, json details = json::object()) {
  details["stage"] = stage;
  details["finished_at"] = utc_now();
  details["wall_time_s"] = seconds;
  write_json(dir / "volatile.json", details);
}

json class_counts_json(const FeatureMatrix& m) {
  auto counts = m.class_counts();
  json j = json::object();
  for (std::size_t k = 0; k < kClassCount; ++k) j[std::string(kClassNames[k])] = counts[k];
  return j;
}

json clean_log_json(const CleanLog& log) {
  json rules = json::array();
  for (const auto& r : log.rules)
    rules.push_back({{"rule", r.rule}, {"marginal", r.marginal}, {"attributed", r.attributed}});
  json counts = json::array();
  for (const auto& [label, n] : log.class_counts) counts.push_back({label, n});
  return {{"rows_in", log.rows_in},
          {"rows_out", log.rows_out},
          {"dropped_columns", log.dropped_columns},
          {"rules", rules},
          {"class_counts_first_observed", counts}};
}

template <typename Body>
StageResult guarded(std::string_view stage, Body&& body) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(std::string(stage), e.what());
  }
}

FeatureMatrix load_features(const fs::path& path) { return load_matrix_csv(path.string()).matrix; }

bool has_medications(const FeatureMatrix& m) {
  const auto& meds = medication_columns();
  return std::any_of(m.feature_names.begin(), m.feature_names.end(),
                     [&](const std::string& n) { return std::find(meds.begin(), meds.end(), n) != meds.end(); });
}

struct Balanced {
  BalancedDataset data;
  FeatureMatrix reduced;
  ConvexityReport convexity;
};

Balanced balance_matrix(const FeatureMatrix& m, const RunConfig& c, std::uint64_t seed) {
  BalanceConfig cfg;
  cfg.seed = seed;
  cfg.k_neighbors = c.k_neighbors;
  cfg.target_per_class = c.target;
  cfg.threads = c.threads;
  Balanced out;
  out.reduced = c.target ? cap_classes(m, *c.target, derive_seed(seed, "cap")) : undersample_majority(m, cfg);
  out.data = smote(out.reduced, cfg);
  out.convexity = verify_convexity(out.data);
  if (!out.convexity.ok())
    throw Error(fmt::format("{} of {} synthetic rows failed the convexity check (first at row {})",
                            out.convexity.failures, out.convexity.checked, out.convexity.first_failure.value_or(0)));
  return out;
}

ParamMap parse_params(const std::string& text) {
  if (text.empty()) return {};
  json j;
  if (text.front() == '@') {
    j = read_json(text.substr(1));
    if (j.contains("best")) j = j.at("best");
  } else {
    j = json::parse(text);
  }
  if (!j.is_object()) throw DomainError("learner parameters must be a JSON object");
  return j.get<ParamMap>();
}

std::string num(double v) { return fmt::format("{}", v); }

}  // namespace

// --- prepare -----------------------------------------------------------------------

StageResult run_prepare(const RunConfig& c) {
  return guarded("prepare", [&] {
    auto start = Clock::now();
    if (c.data.empty()) throw Error("no data file given (--data)");
    if (!fs::exists(c.data)) throw Error(fmt::format("data file '{}' does not exist", c.data.string()));
    std::optional<IdMappings> ids;
    if (!c.ids.empty()) {
      if (!fs::exists(c.ids)) throw Error(fmt::format("id mapping file '{}' does not exist", c.ids.string()));
      ids = load_id_mappings(c.ids);
    }

    RawTable raw = load_raw(c.data);
    MissingProfile profile = missing_profile(raw);
    CleanResult cleaned = clean_with_log(raw);
    EncodingPlan plan = default_plan(c.include_meds);
    FeatureMatrix m = build_matrix(cleaned.table, plan);

    fs::path dir = stage_dir(c, "prepare");
    {
      std::ofstream out(dir / "encoded.csv", std::ios::binary);
      write_matrix_csv(m, out);
    }
    {
      std::ofstream out(dir / "missing_profile.csv", std::ios::binary);
      write_missing_profile(profile, out);
    }
    json manifest = manifest_header("prepare", c);
    manifest["clean"] = clean_log_json(cleaned.log);
    manifest["class_counts"] = class_counts_json(m);
    manifest["rows"] = m.n_rows();
    manifest["feature_count"] = m.width();
    manifest["encoding"] = encoding_manifest(plan, m, ids ? &*ids : nullptr);
    write_json(dir / "manifest.json", manifest);
    write_volatile(dir, "prepare", seconds_since(start));
    return StageResult{dir, manifest};
  });
}

// --- balance -----------------------------------------------------------------------

StageResult run_balance(const RunConfig& c) {
  return guarded("balance", [&] {
    auto start = Clock::now();
    FeatureMatrix m = load_features(stage_input(c, "prepare", "encoded.csv"));
    Balanced b = balance_matrix(m, c, derive_seed(c.seed, "balance"));

    fs::path dir = stage_dir(c, "balance");
    {
      std::ofstream out(dir / "balanced.csv", std::ios::binary);
      write_matrix_csv(b.data.data, out, b.data.provenance_labels());
    }
    std::array<std::size_t, kClassCount> synthetic{};
    for (std::size_t i = 0; i < b.data.provenance.size(); ++i)
      if (b.data.provenance[i] == Provenance::synthetic) ++synthetic[static_cast<std::size_t>(b.data.data.labels[i])];
    json synthetic_j = json::object();
    for (std::size_t k = 0; k < kClassCount; ++k) synthetic_j[std::string(kClassNames[k])] = synthetic[k];

    json manifest = manifest_header("balance", c);
    manifest["class_counts_in"] = class_counts_json(m);
    manifest["class_counts_reduced"] = class_counts_json(b.reduced);
    manifest["class_counts_out"] = class_counts_json(b.data.data);
    manifest["synthetic_rows"] = synthetic_j;
    manifest["convexity"] = {{"checked", b.convexity.checked}, {"failures", b.convexity.failures}};
    manifest["reduction"] = c.target ? "cap_classes" : "undersample_majority";
    write_json(dir / "manifest.json", manifest);
    write_volatile(dir, "balance", seconds_since(start));
    return StageResult{dir, manifest};
  });
}

// --- baseline ----------------------------------------------------------------------

namespace {

struct TrainTest {
  FeatureMatrix train;
  FeatureMatrix test;
};

// The 80/20 split used by baseline and train-only tuning.
TrainTest experiment_split(const RunConfig& c, Scope scope) {
  const std::uint64_t split_seed = derive_seed(c.seed, "split");
  if (scope == Scope::full) {
    FeatureMatrix m = load_features(stage_input(c, "balance", "balanced.csv"));
    auto [train, test] = split(m, c.train_fraction, split_seed, true);
    return {std::move(train), std::move(test)};
  }
  FeatureMatrix m = load_features(stage_input(c, "prepare", "encoded.csv"));
  auto [train, test] = split(m, c.train_fraction, split_seed, true);
  Balanced b = balance_matrix(train, c, derive_seed(c.seed, "balance"));
  return {std::move(b.data.data), std::move(test)};
}

}  // namespace

StageResult run_baseline(const RunConfig& c) {
  return guarded("baseline", [&] {
    auto start = Clock::now();
    TrainTest data = experiment_split(c, c.balance_scope);

    struct Variant {
      std::string name;
      FeatureMatrix train;
      FeatureMatrix test;
    };
    std::vector<Variant> variants;
    const bool meds = has_medications(data.train);
    variants.push_back({meds ? "with_meds" : "without_meds", data.train, data.test});
    if (c.ablation && meds) {
      const auto& cols = medication_columns();
      variants.push_back({"without_meds", data.train.drop_sources(cols), data.test.drop_sources(cols)});
    }

    fs::path dir = stage_dir(c, "baseline");
    std::ostringstream table;
    csv::write_row(table, std::vector<std::string>{"variant", "model", "recall_macro", "precision_macro", "f1_macro",
                                                   "accuracy", "recall_micro", "precision_micro", "f1_micro"});
    json variants_j = json::array();
    json timings = json::array();
    for (const auto& v : variants) {
      json models = json::array();
      for (std::size_t fi = 0; fi < kAllFamilies.size(); ++fi) {
        Family f = kAllFamilies[fi];
        LearnerSpec spec{f, {}, derive_seed(c.seed, "baseline", fi), c.threads};
        TrainedModel model = fit(spec, v.train);
        EvalReport r = evaluate(model, v.test.x, v.test.labels);
        csv::write_row(table, std::vector<std::string>{v.name, std::string(to_string(f)), num(r.macro_recall),
                                                       num(r.macro_precision), num(r.macro_f1), num(r.accuracy),
                                                       num(r.micro_recall), num(r.micro_precision), num(r.micro_f1)});
        std::ofstream cm_out(dir / fmt::format("confusion_{}_{}.csv", v.name, to_string(f)), std::ios::binary);
        write_confusion_csv(r.confusion, cm_out);
        json m = model.manifest();
        m.erase("train_seconds");
        models.push_back({{"model", m}, {"report", to_json(r, false)}});
        timings.push_back({{"variant", v.name},
                           {"model", to_string(f)},
                           {"train_seconds", model.train_seconds()},
                           {"predict_seconds", r.wall_time_s}});
      }
      variants_j.push_back({{"variant", v.name},
                            {"feature_count", v.train.width()},
                            {"train_rows", v.train.n_rows()},
                            {"test_rows", v.test.n_rows()},
                            {"train_class_counts", class_counts_json(v.train)},
                            {"test_class_counts", class_counts_json(v.test)},
                            {"models", models}});
    }
    write_text(dir / "baseline.csv", table.str());
    json manifest = manifest_header("baseline", c);
    manifest["variants"] = variants_j;
    write_json(dir / "report.json", manifest);
    write_json(dir / "manifest.json", manifest_header("baseline", c));
    write_volatile(dir, "baseline", seconds_since(start), {{"models", timings}});
    return StageResult{dir, manifest};
  });
}

// --- tune ----------------------------------------------------------------------------

StageResult run_tune(const RunConfig& c) {
  return guarded("tune", [&] {
    auto start = Clock::now();
    FeatureMatrix m = c.tune_scope == Scope::full ? load_features(stage_input(c, "balance", "balanced.csv"))
                                                  : experiment_split(c, c.balance_scope).train;

    std::optional<ParamGrid> file_grid;
    if (!c.grid.empty()) file_grid = load_grid(c.grid);
    std::vector<Family> families = c.families;
    if (families.empty()) {
      if (file_grid) families.push_back(file_grid->family);
      else
        for (Family f : kAllFamilies)
          if (f != Family::naive_bayes) families.push_back(f);
    }

    GridSearchOptions opts;
    opts.k = c.tune_folds;
    opts.seed = derive_seed(c.seed, "tune");
    opts.budget = c.budget;
    opts.threads = c.threads;
    FoldPlan plan = make_fold_plan(m.labels, opts.k, opts.seed, opts.stratified);

    fs::path dir = stage_dir(c, "tune");
    std::ostringstream table;
    csv::write_row(table, std::vector<std::string>{"model", "default_accuracy", "tuned_accuracy", "significance",
                                                   "best_params", "evaluated", "grid_size"});
    json families_j = json::array();
    json notes = json::array();
    json timings = json::array();
    for (Family f : families) {
      auto family_start = Clock::now();
      LearnerSpec defaults{f, {}, derive_seed(opts.seed, "default"), 1};
      double before = cross_validate(defaults, m, plan, c.threads).mean.accuracy;
      if (f == Family::naive_bayes) {
        notes.push_back("naive_bayes: no tunable grid");
        csv::write_row(table, std::vector<std::string>{"naive_bayes", num(before), "N/A", "N/A", "", "0", "0"});
        families_j.push_back({{"family", "naive_bayes"}, {"default_accuracy", before}, {"grid", nullptr}});
        continue;
      }
      ParamGrid grid = file_grid && file_grid->family == f ? *file_grid : builtin_grid(f);
      GridSearchResult result = grid_search(grid, m, opts);
      const GridRow& best = result.best();
      Significance sig = significance(before, best.mean_accuracy);
      csv::write_row(table, std::vector<std::string>{std::string(to_string(f)), num(before), num(best.mean_accuracy),
                                                     std::string(to_string(sig)), describe(best.params),
                                                     std::to_string(result.rows.size()),
                                                     std::to_string(result.grid_size)});
      {
        std::ofstream out(dir / fmt::format("{}_grid.csv", to_string(f)), std::ios::binary);
        write_grid_csv(result, out);
      }

      json family_j = {{"family", to_string(f)},
                       {"default_accuracy", before},
                       {"tuned_accuracy", best.mean_accuracy},
                       {"significance", to_string(sig)},
                       {"result", to_json(result)},
                       {"summary", nullptr},
                       {"boxplot", nullptr}};
      const std::size_t n = std::min(c.summary_n, result.rows.size() / 2);
      if (n >= 1) family_j["summary"] = to_json(summarize(result, n));
      if (result.rows.size() >= 4) {
        std::vector<ScoredConfig> scored;
        for (const auto& r : result.rows) scored.push_back({r.mean_accuracy, r.params});
        BoxplotSummary box = boxplot_summary(scored);
        family_j["boxplot"] = to_json(box);
        std::ofstream out(dir / fmt::format("{}_boxplot.csv", to_string(f)), std::ios::binary);
        write_boxplot_csv(scored, box, out);
      }
      if (result.rows.size() < result.grid_size)
        notes.push_back(fmt::format("{}: budget evaluated {} of {} configurations", to_string(f), result.rows.size(),
                                    result.grid_size));
      // Written as a standalone file so compare can take "@tune/<family>.json".
      json standalone = family_j;
      standalone["best"] = best.params;
      write_json(dir / fmt::format("{}.json", to_string(f)), standalone);
      families_j.push_back(family_j);
      timings.push_back({{"family", to_string(f)}, {"seconds", seconds_since(family_start)}});
    }
    write_text(dir / "tuning.csv", table.str());
    json manifest = manifest_header("tune", c);
    manifest["rows"] = m.n_rows();
    manifest["folds"] = opts.k;
    manifest["families"] = families_j;
    manifest["notes"] = notes;
    write_json(dir / "report.json", manifest);
    write_json(dir / "manifest.json", manifest_header("tune", c));
    write_volatile(dir, "tune", seconds_since(start), {{"families", timings}});
    return StageResult{dir, manifest};
  });
}

// --- compare -------------------------------------------------------------------------

std::vector<ScoreColumns> load_score_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open score table '" + path.string() + "'");
  csv::Reader reader(in);
  std::vector<std::string> header;
  if (!reader.next(header)) throw ParseError("score table is empty");

  std::vector<ScoreColumns> out;
  std::vector<std::pair<std::size_t, std::size_t>> columns;  // (a, b) per metric
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::string name = csv::trim(header[i]);
    if (name.size() < 3 || name.substr(name.size() - 2) != "_a") continue;
    std::string metric = name.substr(0, name.size() - 2);
    auto it = std::find_if(header.begin(), header.end(),
                           [&](const std::string& h) { return csv::trim(h) == metric + "_b"; });
    if (it == header.end()) throw ParseError(fmt::format("score table: column '{}_b' missing", metric));
    out.push_back({metric, {}, {}});
    columns.emplace_back(i, static_cast<std::size_t>(it - header.begin()));
  }
  if (out.empty()) throw ParseError("score table has no <metric>_a / <metric>_b column pairs");

  auto parse = [&](const std::string& text, std::size_t row) {
    std::string t = csv::trim(text);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
      throw ParseError(fmt::format("score table row {}: '{}' is not a number", row, text), row);
    return v;
  };
  std::vector<std::string> fields;
  for (std::size_t row = 0; reader.next(fields); ++row) {
    if (fields.size() == 1 && csv::trim(fields[0]).empty()) continue;
    if (fields.size() != header.size())
      throw ParseError(fmt::format("score table row {}: {} fields, expected {}", row, fields.size(), header.size()),
                       row);
    for (std::size_t m = 0; m < out.size(); ++m) {
      out[m].a.push_back(parse(fields[columns[m].first], row));
      out[m].b.push_back(parse(fields[columns[m].second], row));
    }
  }
  return out;
}

StageResult run_compare(const RunConfig& c) {
  return guarded("compare", [&] {
    auto start = Clock::now();
    std::vector<ScoreColumns> scores;
    json models = nullptr;
    if (!c.scores_file.empty()) {
      scores = load_score_table(c.scores_file);
    } else {
      FeatureMatrix m = load_features(stage_input(c, "balance", "balanced.csv"));
      FoldPlan plan = make_fold_plan(m.labels, c.folds, derive_seed(c.seed, "compare"), true);
      LearnerSpec a{c.model_a, parse_params(c.params_a), derive_seed(c.seed, "compare_model"), c.threads};
      LearnerSpec b{c.model_b, parse_params(c.params_b), derive_seed(c.seed, "compare_model"), c.threads};
      CvResult ra = cross_validate(a, m, plan);
      CvResult rb = cross_validate(b, m, plan);
      if (ra.folds.size() != rb.folds.size()) throw DomainError("fold counts differ between the two models");
      scores = {{"accuracy", {}, {}}, {"recall", {}, {}}, {"precision", {}, {}}, {"f1", {}, {}}};
      for (std::size_t f = 0; f < ra.folds.size(); ++f) {
        const EvalReport* reps[2] = {&ra.folds[f], &rb.folds[f]};
        for (int side = 0; side < 2; ++side) {
          const EvalReport& r = *reps[side];
          double vals[4] = {r.accuracy, r.macro_recall, r.macro_precision, r.macro_f1};
          for (std::size_t mi = 0; mi < 4; ++mi) (side == 0 ? scores[mi].a : scores[mi].b).push_back(vals[mi]);
        }
      }
      models = {{"a", {{"family", to_string(c.model_a)}, {"params", resolve_params(c.model_a, a.params)}}},
                {"b", {{"family", to_string(c.model_b)}, {"params", resolve_params(c.model_b, b.params)}}},
                {"folds", c.folds},
                {"rows", m.n_rows()}};
    }

    fs::path dir = stage_dir(c, "compare");
    std::ostringstream table;
    std::vector<std::string> header{"fold"};
    for (const auto& s : scores) header.push_back(s.metric + "_a");
    for (const auto& s : scores) header.push_back(s.metric + "_b");
    csv::write_row(table, header);
    const std::size_t n_folds = scores.front().a.size();
    for (std::size_t f = 0; f < n_folds; ++f) {
      std::vector<std::string> row{std::to_string(f + 1)};
      for (const auto& s : scores) row.push_back(num(s.a[f]));
      for (const auto& s : scores) row.push_back(num(s.b[f]));
      csv::write_row(table, row);
    }
    write_text(dir / "folds.csv", table.str());

    json tests = json::object();
    for (const auto& s : scores)
      tests[s.metric] = to_json(sign_test(s.a, s.b, 0.05, &reported_critical_values()));
    const std::string primary = tests.contains("accuracy") ? "accuracy" : scores.front().metric;

    json manifest = manifest_header("compare", c);
    manifest["models"] = models;
    manifest["primary_metric"] = primary;
    manifest["decision"] = tests[primary]["decision"];
    manifest["sign_tests"] = tests;
    write_json(dir / "report.json", manifest);
    write_json(dir / "manifest.json", manifest_header("compare", c));
    write_volatile(dir, "compare", seconds_since(start));
    return StageResult{dir, manifest};
  });
}

}  // namespace readmit
