// calibkit command-line harness.
//
// Exit codes: 0 success, 1 internal error, 2 input or contract error.

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "calibkit/config.hpp"
#include "calibkit/errors.hpp"
#include "calibkit/experiments.hpp"
#include "calibkit/io.hpp"
#include "calibkit/report.hpp"

namespace {

using namespace calibkit;

struct SharedFlags {
  std::uint64_t seed = kDefaultSeed;
  std::size_t n = 0;
  int bins = 10;
  std::string out;
  std::string format = "json";
  std::string config;
  bool timestamp = false;

  CLI::Option* seed_opt = nullptr;
  CLI::Option* n_opt = nullptr;
  CLI::Option* bins_opt = nullptr;
};

void add_shared(CLI::App* cmd, SharedFlags& f) {
  f.seed_opt = cmd->add_option("--seed", f.seed, "Base RNG seed");
  f.n_opt = cmd->add_option("--n", f.n, "Sample count");
  f.bins_opt = cmd->add_option("--bins", f.bins, "Number of ECE bins (M)");
  cmd->add_option("--out", f.out, "Output directory for report files");
  cmd->add_option("--format", f.format, "Stdout format when --out is absent")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--config", f.config, "Key-value experiment config file");
  cmd->add_flag("--timestamp", f.timestamp, "Record the wall-clock time in provenance");
}

// Config file first, then any flag given on the command line.
ExperimentConfig resolve(const std::string& experiment, const SharedFlags& f) {
  ExperimentConfig cfg = f.config.empty() ? default_config(experiment)
                                          : parse_config_text(read_file(f.config));
  if (cfg.experiment != experiment) {
    throw ContractError("config file is for '" + cfg.experiment + "', not '" + experiment + "'");
  }
  if (f.seed_opt->count()) cfg.seed = f.seed;
  if (f.n_opt->count()) cfg.n = f.n;
  if (f.bins_opt->count()) cfg.bins = f.bins;
  if (!f.out.empty()) cfg.output = f.out;
  cfg.training.seed = cfg.seed;
  return cfg;
}

std::string utc_now() {
  const auto t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void emit(ReportDocument doc, const ExperimentConfig& cfg, const SharedFlags& f) {
  if (f.timestamp) doc.provenance.timestamp = utc_now();
  if (!cfg.output.empty()) {
    for (const auto& p : write_report(doc, cfg.output)) std::cerr << "wrote " << p.string() << "\n";
  } else if (f.format == "csv" && !doc.tables.empty()) {
    std::cout << table_to_csv(doc.tables.front());
  } else {
    std::cout << to_json(doc).dump(2) << "\n";
  }
}

void announce_seed(std::uint64_t seed) { std::cerr << "seed: " << seed << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Calibration metrics and simulation harness"};
  app.require_subcommand(1);
  app.set_version_flag("--version", CALIBKIT_VERSION);

  // eval
  SharedFlags eval_flags;
  std::string eval_file;
  auto* eval = app.add_subcommand("eval", "Score a prediction file (CSV p_hat,outcome or JSON)");
  eval->add_option("file", eval_file, "Prediction file")->required();
  add_shared(eval, eval_flags);

  // experiments
  SharedFlags case1_flags;
  std::vector<std::string> case1_dists;
  auto* case1 = app.add_subcommand("case1", "Optimal model under beta operating conditions");
  add_shared(case1, case1_flags);
  auto* case1_dist_opt =
      case1->add_option("--dist", case1_dists, "Distribution, e.g. beta(0.5,0.5); repeatable");
  int case1_hist = 50;
  auto* case1_hist_opt = case1->add_option("--histogram-bins", case1_hist, "Histogram bins");

  SharedFlags sb_flags;
  std::vector<double> sb_tendencies;
  std::size_t sb_reps = 0;
  int sb_min = 0;
  int sb_max = 0;
  auto* sweep_bins = app.add_subcommand("sweep-bins", "ECE over a range of bin counts");
  add_shared(sweep_bins, sb_flags);
  auto* sb_t_opt = sweep_bins->add_option("--tendency", sb_tendencies, "Model tendency; repeatable");
  auto* sb_r_opt = sweep_bins->add_option("--replicates", sb_reps, "Replicate count");
  auto* sb_min_opt = sweep_bins->add_option("--bins-min", sb_min, "Smallest M");
  auto* sb_max_opt = sweep_bins->add_option("--bins-max", sb_max, "Largest M");

  SharedFlags ds_flags;
  std::vector<std::size_t> ds_sizes;
  double ds_tendency = 0.1;
  std::size_t ds_reps = 0;
  auto* sweep_ds = app.add_subcommand("sweep-datasize", "ECE and Balance error over data size");
  add_shared(sweep_ds, ds_flags);
  auto* ds_sizes_opt = sweep_ds->add_option("--sizes", ds_sizes, "Sample sizes");
  auto* ds_t_opt = sweep_ds->add_option("--tendency", ds_tendency, "Model tendency");
  auto* ds_r_opt = sweep_ds->add_option("--replicates", ds_reps, "Replicates per size");

  SharedFlags te_flags;
  std::string te_profile;
  std::string te_train;
  std::string te_test;
  std::string te_model_out;
  double te_fraction = 0.6;
  TrainConfig te_cfg;
  auto* train_eval = app.add_subcommand("train-eval", "Train logistic regression and evaluate");
  add_shared(train_eval, te_flags);
  auto* te_profile_opt = train_eval->add_option("--profile", te_profile, "early, mid or late")
                             ->check(CLI::IsMember({"early", "mid", "late"}));
  auto* te_train_opt = train_eval->add_option("--train", te_train, "Training dataset CSV");
  auto* te_test_opt = train_eval->add_option("--test", te_test, "Test dataset CSV");
  auto* te_frac_opt = train_eval->add_option("--train-fraction", te_fraction, "Train share");
  auto* te_lr_opt = train_eval->add_option("--learning-rate", te_cfg.learning_rate);
  auto* te_it_opt = train_eval->add_option("--max-iters", te_cfg.max_iters);
  auto* te_tol_opt = train_eval->add_option("--tolerance", te_cfg.tolerance);
  auto* te_l2_opt = train_eval->add_option("--l2", te_cfg.l2);
  train_eval->add_option("--save-model", te_model_out, "Write the trained model as JSON");

  // expected-score
  std::string es_rule = "balance";
  std::string es_dist = "uniform";
  std::string es_model = "optimal";
  std::string es_method = "quadrature";
  std::uint64_t es_seed = kDefaultSeed;
  std::size_t es_n = 100000;
  std::size_t es_nodes = 256;
  std::string es_out;
  std::string es_format = "json";
  auto* expected = app.add_subcommand("expected-score", "Expected score by quadrature or simulation");
  expected->add_option("--rule", es_rule, "accuracy, brier, balance or true-ece")
      ->check(CLI::IsMember({"accuracy", "brier", "balance", "true-ece"}));
  expected->add_option("--dist", es_dist, "beta(a,b) or uniform");
  expected->add_option("--model", es_model, "optimal, tendency(t) or t");
  expected->add_option("--method", es_method, "quadrature, mc or both")
      ->check(CLI::IsMember({"quadrature", "mc", "both"}));
  expected->add_option("--seed", es_seed);
  expected->add_option("--n", es_n, "Monte Carlo sample count");
  expected->add_option("--nodes", es_nodes, "Initial quadrature nodes (>= 64)");
  expected->add_option("--out", es_out, "Output directory for expected_score.json");
  expected->add_option("--format", es_format, "Stdout format when --out is absent")
      ->check(CLI::IsMember({"json", "csv"}));

  // generate
  std::string gen_dist = "uniform";
  std::string gen_model = "optimal";
  std::uint64_t gen_seed = kDefaultSeed;
  std::size_t gen_n = 1000;
  std::string gen_format = "csv";
  std::string gen_out;
  auto* generate = app.add_subcommand("generate", "Write a scored batch with its hidden truth");
  generate->add_option("--dist", gen_dist);
  generate->add_option("--model", gen_model);
  generate->add_option("--seed", gen_seed);
  generate->add_option("--n", gen_n);
  generate->add_option("--format", gen_format)->check(CLI::IsMember({"json", "csv"}));
  generate->add_option("--out", gen_out, "Output file (stdout when absent)");

  // snapshots
  std::string snap_profile = "mid";
  std::uint64_t snap_seed = kDefaultSeed;
  std::size_t snap_n = 1000;
  std::string snap_out;
  auto* snapshots = app.add_subcommand("snapshots", "Write a synthetic game-snapshot dataset");
  snapshots->add_option("--profile", snap_profile)->check(CLI::IsMember({"early", "mid", "late"}));
  snapshots->add_option("--seed", snap_seed);
  snapshots->add_option("--n", snap_n);
  snapshots->add_option("--out", snap_out, "Output CSV (stdout when absent)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*eval) {
      const auto preds = load_predictions(eval_file);
      const auto report = full_report(preds, eval_flags.bins);
      const auto bins = compute_bins(preds, eval_flags.bins);
      nlohmann::json doc = to_json(report);
      doc["bins"] = nlohmann::json::array();
      for (const auto& b : bins) doc["bins"].push_back(to_json(b));
      if (!eval_flags.out.empty()) {
        const std::filesystem::path dir(eval_flags.out);
        write_file(dir / "report.json", doc.dump(2) + "\n");
        write_file(dir / "report.csv", report_to_csv(report));
        write_file(dir / "bins.csv", bins_to_csv(bins));
        std::cerr << "wrote " << (dir / "report.json").string() << "\n";
      } else if (eval_flags.format == "csv") {
        std::cout << report_to_csv(report);
      } else {
        std::cout << doc.dump(2) << "\n";
      }
    } else if (*case1) {
      auto cfg = resolve("case1", case1_flags);
      if (case1_dist_opt->count()) {
        cfg.distributions.clear();
        for (const auto& d : case1_dists) cfg.distributions.push_back(parse_distribution(d));
      }
      if (case1_hist_opt->count()) cfg.histogram_bins = case1_hist;
      announce_seed(cfg.seed);
      emit(run_experiment(cfg), cfg, case1_flags);
    } else if (*sweep_bins) {
      auto cfg = resolve("sweep-bins", sb_flags);
      if (sb_t_opt->count()) cfg.tendencies = sb_tendencies;
      if (sb_r_opt->count()) cfg.replicates = sb_reps;
      if (sb_min_opt->count()) cfg.bins_min = sb_min;
      if (sb_max_opt->count()) cfg.bins_max = sb_max;
      announce_seed(cfg.seed);
      emit(run_experiment(cfg), cfg, sb_flags);
    } else if (*sweep_ds) {
      auto cfg = resolve("sweep-datasize", ds_flags);
      if (ds_sizes_opt->count()) cfg.sizes = ds_sizes;
      if (ds_t_opt->count()) cfg.tendencies = {ds_tendency};
      if (ds_r_opt->count()) cfg.replicates = ds_reps;
      announce_seed(cfg.seed);
      emit(run_experiment(cfg), cfg, ds_flags);
    } else if (*train_eval) {
      auto cfg = resolve("train-eval", te_flags);
      if (te_profile_opt->count()) cfg.profile = te_profile;
      if (te_train_opt->count()) cfg.train_file = te_train;
      if (te_test_opt->count()) cfg.test_file = te_test;
      if (te_frac_opt->count()) cfg.train_fraction = te_fraction;
      if (te_lr_opt->count()) cfg.training.learning_rate = te_cfg.learning_rate;
      if (te_it_opt->count()) cfg.training.max_iters = te_cfg.max_iters;
      if (te_tol_opt->count()) cfg.training.tolerance = te_cfg.tolerance;
      if (te_l2_opt->count()) cfg.training.l2 = te_cfg.l2;
      announce_seed(cfg.seed);
      const auto result = run_train_eval(cfg);
      for (const auto& w : result.model.standardization.warnings) std::cerr << "warning: " << w << "\n";
      if (!te_model_out.empty()) write_file(te_model_out, model_to_json(result.model) + "\n");
      emit(train_eval_report(cfg, result), cfg, te_flags);
    } else if (*expected) {
      const auto dist = parse_distribution(es_dist);
      const auto model = parse_model(es_model);
      QuadratureSpec spec;
      spec.nodes = es_nodes;
      nlohmann::json out = nlohmann::json::array();
      const bool quad = es_method != "mc";
      const bool mc = es_method != "quadrature";
      if (es_rule == "true-ece") {
        if (mc) throw ContractError("true-ece has no Monte Carlo estimator; use --method quadrature");
        out.push_back(to_json(ExpectedScoreRecord{"true_ece", dist.name(), model.name(),
                                                  "quadrature",
                                                  true_ece_analytic(dist, model, spec),
                                                  std::nullopt}));
      } else {
        const auto rule = parse_scoring_rule(es_rule);
        if (quad) {
          out.push_back(to_json(ExpectedScoreRecord{
              es_rule, dist.name(), model.name(), "quadrature",
              expected_score_quadrature(rule, dist, model, spec), std::nullopt}));
        }
        if (mc) {
          announce_seed(es_seed);
          const auto est = expected_score_mc(rule, dist, model, es_n, es_seed);
          out.push_back(to_json(ExpectedScoreRecord{es_rule, dist.name(), model.name(), "mc",
                                                    est.mean, est.std_error}));
        }
      }
      if (!es_out.empty()) {
        write_file(std::filesystem::path(es_out) / "expected_score.json", out.dump(2) + "\n");
      } else if (es_format == "csv") {
        std::cout << "rule,distribution,model,method,value,std_error\n";
        for (const auto& r : out) {
          std::cout << r["rule"].get<std::string>() << ",\"" << r["distribution"].get<std::string>()
                    << "\"," << r["model"].get<std::string>() << "," << r["method"].get<std::string>()
                    << "," << format_double(r["value"].get<double>()) << ","
                    << (r.contains("std_error") ? format_double(r["std_error"].get<double>()) : "")
                    << "\n";
        }
      } else {
        std::cout << out.dump(2) << "\n";
      }
    } else if (*generate) {
      announce_seed(gen_seed);
      const auto batch =
          generate_batch(parse_distribution(gen_dist), parse_model(gen_model), gen_n, gen_seed);
      const std::string text =
          gen_format == "json" ? to_json(batch).dump(2) + "\n" : batch_to_csv(batch);
      if (gen_out.empty()) {
        std::cout << text;
      } else {
        write_file(gen_out, text);
      }
    } else if (*snapshots) {
      announce_seed(snap_seed);
      const auto ds = generate_snapshots(snap_n, parse_time_profile(snap_profile), snap_seed);
      if (snap_out.empty()) {
        std::cout << dataset_to_csv(ds);
      } else {
        write_file(snap_out, dataset_to_csv(ds));
      }
    }
  } catch (const ContractError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
