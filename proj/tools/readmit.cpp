// readmit: prepare, balance, evaluate, tune and compare readmission models.

#include <deque>
#include <functional>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "readmit/pipeline.hpp"

namespace {

using readmit::RunConfig;

// Collects options whose values override the config file only when given.
class Overrides {
 public:
  explicit Overrides(CLI::App* app) : app_(app) {}

  template <typename T, typename Apply>
  CLI::Option* option(const std::string& name, const std::string& help, Apply apply) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app_->add_option(name, *value, help);
    apply_.push_back([opt, value, apply](RunConfig& c) {
      if (opt->count() > 0) apply(c, *value);
    });
    return opt;
  }

  template <typename Apply>
  CLI::Option* flag(const std::string& name, const std::string& help, Apply apply) {
    CLI::Option* opt = app_->add_flag(name, help);
    apply_.push_back([opt, apply](RunConfig& c) {
      if (opt->count() > 0) apply(c);
    });
    return opt;
  }

  void apply(RunConfig& c) const {
    for (const auto& f : apply_) f(c);
  }

 private:
  CLI::App* app_;
  std::vector<std::function<void(RunConfig&)>> apply_;
};

struct Command {
  CLI::App* app = nullptr;
  std::string config_path;
  std::unique_ptr<Overrides> overrides;
  std::function<readmit::StageResult(const RunConfig&)> run;
};

void add_common(Command& cmd) {
  cmd.app->add_option("--config", cmd.config_path, "JSON config file; flags override its keys")
      ->check(CLI::ExistingFile);
  auto& o = *cmd.overrides;
  o.option<std::uint64_t>("--seed", "Master seed", [](RunConfig& c, std::uint64_t v) { c.seed = v; });
  o.option<std::string>("--out", "Output directory", [](RunConfig& c, const std::string& v) { c.out = v; });
  o.option<std::size_t>("--threads", "Worker threads (0 = all cores)",
                        [](RunConfig& c, std::size_t v) { c.threads = v; });
}

void add_balance_options(Overrides& o) {
  o.option<std::string>("--target", "Rows per class after balancing, or auto", [](RunConfig& c, const std::string& v) {
    if (v == "auto")
      c.target.reset();
    else
      c.target = std::stoul(v);
  });
  o.option<std::size_t>("--k", "SMOTE neighbors", [](RunConfig& c, std::size_t v) { c.k_neighbors = v; });
}

void add_split_options(Overrides& o) {
  o.option<std::string>("--balance-scope", "full or train-only", [](RunConfig& c, const std::string& v) {
    c.balance_scope = readmit::parse_scope(v);
  });
  o.option<double>("--train-fraction", "Training share of the split",
                   [](RunConfig& c, double v) { c.train_fraction = v; });
}

void print_summary(const std::string& name, const readmit::StageResult& r) {
  const auto& m = r.manifest;
  if (name == "prepare") {
    const auto& cc = m.at("class_counts");
    fmt::print("prepare: {} rows in, {} kept; NO={} >30={} <30={}; {} features\n",
               m.at("clean").at("rows_in").get<std::size_t>(), m.at("rows").get<std::size_t>(),
               cc.at("NO").get<std::size_t>(), cc.at(">30").get<std::size_t>(), cc.at("<30").get<std::size_t>(),
               m.at("feature_count").get<std::size_t>());
  } else if (name == "balance") {
    const auto& cc = m.at("class_counts_out");
    fmt::print("balance: NO={} >30={} <30={}; {} synthetic rows verified\n", cc.at("NO").get<std::size_t>(),
               cc.at(">30").get<std::size_t>(), cc.at("<30").get<std::size_t>(),
               m.at("convexity").at("checked").get<std::size_t>());
  } else if (name == "baseline") {
    for (const auto& v : m.at("variants"))
      for (const auto& model : v.at("models"))
        fmt::print("baseline {} {}: accuracy {:.4f}, macro recall {:.4f}\n", v.at("variant").get<std::string>(),
                   model.at("model").at("family").get<std::string>(),
                   model.at("report").at("accuracy").get<double>(),
                   model.at("report").at("macro_recall").get<double>());
  } else if (name == "tune") {
    for (const auto& f : m.at("families")) {
      if (!f.contains("tuned_accuracy")) continue;
      fmt::print("tune {}: default {:.4f} -> tuned {:.4f} ({})\n", f.at("family").get<std::string>(),
                 f.at("default_accuracy").get<double>(), f.at("tuned_accuracy").get<double>(),
                 f.at("significance").get<std::string>());
    }
    for (const auto& note : m.at("notes")) fmt::print("note: {}\n", note.get<std::string>());
  } else if (name == "compare") {
    for (const auto& [metric, t] : m.at("sign_tests").items())
      fmt::print("compare {}: wins {}-{}, ties {}, p={:.6g}, {}\n", metric, t.at("wins_a").get<std::size_t>(),
                 t.at("wins_b").get<std::size_t>(), t.at("ties").get<std::size_t>(),
                 t.at("p_value_two_sided").get<double>(), t.at("decision").get<std::string>());
  }
  fmt::print("{}: wrote {}\n", name, r.dir.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Readmission modelling pipeline"};
  app.require_subcommand(1);

  // Options bind to Command members, so elements must not move.
  std::deque<Command> commands;
  auto add = [&](const std::string& name, const std::string& help,
                 std::function<readmit::StageResult(const RunConfig&)> run) -> Command& {
    Command& cmd = commands.emplace_back();
    cmd.app = app.add_subcommand(name, help);
    cmd.overrides = std::make_unique<Overrides>(cmd.app);
    cmd.run = std::move(run);
    add_common(cmd);
    return cmd;
  };

  {
    auto& o = *add("prepare", "Clean and encode the raw data", readmit::run_prepare).overrides;
    o.option<std::string>("--data", "diabetic_data.csv", [](RunConfig& c, const std::string& v) { c.data = v; });
    o.option<std::string>("--ids", "IDS_mapping.csv", [](RunConfig& c, const std::string& v) { c.ids = v; });
    o.flag("--include-meds", "Keep the medication columns (default)", [](RunConfig& c) { c.include_meds = true; });
    o.flag("--exclude-meds", "Drop the medication columns", [](RunConfig& c) { c.include_meds = false; });
  }
  {
    auto& o = *add("balance", "Undersample and SMOTE the prepared data", readmit::run_balance).overrides;
    add_balance_options(o);
  }
  {
    auto& o = *add("baseline", "Fit every family with default parameters on a train/test split",
                   readmit::run_baseline)
                   .overrides;
    add_split_options(o);
    add_balance_options(o);
    o.flag("--ablation", "Also evaluate without the medication columns", [](RunConfig& c) { c.ablation = true; });
  }
  {
    auto& o = *add("tune", "Grid search under cross-validation", readmit::run_tune).overrides;
    add_split_options(o);
    add_balance_options(o);
    o.option<std::vector<std::string>>("--family", "Family to tune (repeatable)",
                                       [](RunConfig& c, const std::vector<std::string>& v) {
                                         c.families.clear();
                                         for (const auto& f : v) c.families.push_back(readmit::parse_family(f));
                                       });
    o.option<std::string>("--grid", "Grid JSON file", [](RunConfig& c, const std::string& v) { c.grid = v; });
    o.option<std::size_t>("--budget", "Maximum configurations per family",
                          [](RunConfig& c, std::size_t v) { c.budget = v; });
    o.option<std::size_t>("--folds", "Cross-validation folds", [](RunConfig& c, std::size_t v) { c.tune_folds = v; });
    o.option<std::string>("--tune-scope", "full or train-only",
                          [](RunConfig& c, const std::string& v) { c.tune_scope = readmit::parse_scope(v); });
    o.option<std::size_t>("--summary-n", "Configurations in the top and bottom summaries",
                          [](RunConfig& c, std::size_t v) { c.summary_n = v; });
  }
  {
    auto& o = *add("compare", "Sign test between two models over cross-validation folds", readmit::run_compare)
                   .overrides;
    o.option<std::string>("--model-a", "First family",
                          [](RunConfig& c, const std::string& v) { c.model_a = readmit::parse_family(v); });
    o.option<std::string>("--model-b", "Second family",
                          [](RunConfig& c, const std::string& v) { c.model_b = readmit::parse_family(v); });
    o.option<std::string>("--params-a", "JSON object or @file",
                          [](RunConfig& c, const std::string& v) { c.params_a = v; });
    o.option<std::string>("--params-b", "JSON object or @file",
                          [](RunConfig& c, const std::string& v) { c.params_b = v; });
    o.option<std::size_t>("--folds", "Cross-validation folds", [](RunConfig& c, std::size_t v) { c.folds = v; });
    o.option<std::string>("--scores-file", "Per-fold score table to test instead of training",
                          [](RunConfig& c, const std::string& v) { c.scores_file = v; });
  }

  CLI11_PARSE(app, argc, argv);

  for (const auto& cmd : commands) {
    if (!cmd.app->parsed()) continue;
    const std::string name = cmd.app->get_name();
    try {
      RunConfig config = cmd.config_path.empty() ? RunConfig{} : RunConfig::load(cmd.config_path);
      cmd.overrides->apply(config);
      print_summary(name, cmd.run(config));
    } catch (const readmit::StageError& e) {
      std::cerr << fmt::format("error [{}]: {}\n", e.stage(), e.what());
      return 1;
    } catch (const std::exception& e) {
      std::cerr << fmt::format("error [{}]: {}\n", name, e.what());
      return 1;
    }
  }
  return 0;
}
