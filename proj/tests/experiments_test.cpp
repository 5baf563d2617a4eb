#include "calibkit/experiments.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "calibkit/errors.hpp"
#include "calibkit/io.hpp"
#include "calibkit/rng.hpp"
#include "calibkit/snapshot.hpp"

namespace calibkit {
namespace {

ExperimentConfig random_config(SplitMix64& g) {
  static const char* kinds[] = {"case1", "sweep-bins", "sweep-datasize", "train-eval"};
  ExperimentConfig c = default_config(kinds[g() % 4]);
  c.distributions.clear();
  for (std::uint64_t i = 0, k = g() % 4; i < k; ++i) {
    c.distributions.emplace_back(0.05 + 10 * uniform01(g), 0.05 + 10 * uniform01(g));
  }
  c.tendencies.clear();
  for (std::uint64_t i = 0, k = g() % 5; i < k; ++i) c.tendencies.push_back(2 * uniform01(g) - 1);
  c.sizes.clear();
  for (std::uint64_t i = 0, k = g() % 6; i < k; ++i) c.sizes.push_back(1 + g() % 100000);
  c.n = 1 + g() % 1000000;
  c.replicates = 1 + g() % 500;
  c.bins = 1 + static_cast<int>(g() % 200);
  c.bins_min = 1 + static_cast<int>(g() % 20);
  c.bins_max = c.bins_min + static_cast<int>(g() % 100);
  c.seed = g();
  c.output = (g() % 2) ? "" : "out/run_" + std::to_string(g() % 1000);
  c.profile = std::array{"early", "mid", "late"}[g() % 3];
  c.train_fraction = uniform01(g);
  c.train_file = (g() % 2) ? "" : "data/train.csv";
  c.test_file = (g() % 2) ? "" : "data/test.csv";
  c.histogram_bins = 1 + static_cast<int>(g() % 100);
  c.training.learning_rate = uniform01(g);
  c.training.max_iters = g() % 100000;
  c.training.tolerance = 1e-12 * uniform01(g);
  c.training.l2 = uniform01(g) / 3;
  c.training.seed = c.seed;
  return c;
}

TEST(ConfigPropertyTest, TextRoundTripIsLossless) {
  SplitMix64 g(99);
  for (int i = 0; i < 500; ++i) {
    const auto c = random_config(g);
    const auto text = config_to_text(c);
    EXPECT_EQ(parse_config_text(text), c) << text;
  }
}

TEST(ConfigTest, DefaultsAndComments) {
  const auto c = parse_config_text("# sweep\nexperiment = sweep-bins\n\nreplicates = 5  # fewer\n");
  EXPECT_EQ(c.experiment, "sweep-bins");
  EXPECT_EQ(c.replicates, 5u);
  EXPECT_EQ(c.n, 10000u);
  EXPECT_EQ(c.tendencies, (std::vector<double>{0.1, 0.11}));
  EXPECT_EQ(c.bins_min, 5);
  EXPECT_EQ(c.bins_max, 100);
  EXPECT_EQ(default_config("case1").distributions.size(), 3u);
  EXPECT_EQ(default_config("sweep-datasize").sizes.size(), 20u);
  EXPECT_THROW(parse_config_text("n 10"), ContractError);
  EXPECT_THROW(parse_config_text("colour = red"), ContractError);
  EXPECT_THROW(parse_config_text("n = ten"), ContractError);
  EXPECT_THROW(default_config("case2"), ContractError);
}

TEST(ConfigTest, ValidationRejects) {
  auto expect_invalid = [](const std::string& experiment, auto mutate) {
    auto c = default_config(experiment);
    mutate(c);
    EXPECT_THROW(validate(c), ContractError);
  };
  for (const char* e : {"case1", "sweep-bins", "sweep-datasize", "train-eval"}) {
    EXPECT_NO_THROW(validate(default_config(e)));
    expect_invalid(e, [](ExperimentConfig& c) { c.n = 0; });
    expect_invalid(e, [](ExperimentConfig& c) { c.replicates = 0; });
    expect_invalid(e, [](ExperimentConfig& c) { c.bins = 0; });
  }
  expect_invalid("case1", [](ExperimentConfig& c) { c.distributions.clear(); });
  expect_invalid("sweep-bins", [](ExperimentConfig& c) { c.bins_max = c.bins_min - 1; });
  expect_invalid("sweep-bins", [](ExperimentConfig& c) { c.tendencies = {1.5}; });
  expect_invalid("sweep-datasize", [](ExperimentConfig& c) { c.sizes.clear(); });
  expect_invalid("sweep-datasize", [](ExperimentConfig& c) { c.sizes.push_back(0); });
  expect_invalid("train-eval", [](ExperimentConfig& c) { c.train_fraction = 1.0; });
  expect_invalid("train-eval", [](ExperimentConfig& c) { c.profile = "overtime"; });
}

TEST(HistogramTest, CountsEverything) {
  const std::vector<double> v{0.0, 0.01, 0.5, 0.999, 1.0, 0.02};
  const auto h = make_histogram(v, 50);
  ASSERT_EQ(h.counts.size(), 50u);
  EXPECT_EQ(h.counts[0], 2u);
  EXPECT_EQ(h.counts[1], 1u);
  EXPECT_EQ(h.counts[25], 1u);
  EXPECT_EQ(h.counts[49], 2u);
  EXPECT_EQ(h.lower[1], 0.02);
  EXPECT_EQ(h.upper[49], 1.0);
}

TEST(Case1Test, SmallRunIsWellFormed) {
  auto cfg = default_config("case1");
  cfg.n = 100;
  const auto res = run_case1(cfg);
  ASSERT_EQ(res.size(), 3u);
  std::set<std::uint64_t> seeds;
  for (const auto& c : res) {
    seeds.insert(c.seed);
    EXPECT_EQ(c.report.n, 100u);
    EXPECT_EQ(c.monte_carlo.size(), 3u);
    EXPECT_EQ(c.quadrature.count("true_ece"), 1u);
    EXPECT_EQ(c.quadrature.at("true_ece"), 0.0);
    std::size_t total = 0;
    for (auto k : c.p_hat.counts) total += k;
    EXPECT_EQ(total, 100u);
    EXPECT_EQ(c.true_p.counts, c.p_hat.counts);
  }
  EXPECT_EQ(seeds.size(), 3u);
  const auto doc = case1_report(cfg, res);
  EXPECT_EQ(doc.rows.size(), 3u);
  EXPECT_FALSE(doc.provenance.calls.empty());
  EXPECT_EQ(doc.summary.count("max_mc_quadrature_z"), 1u);
}

TEST(SweepBinsTest, SharesBatchesAcrossTendencies) {
  auto cfg = default_config("sweep-bins");
  cfg.n = 500;
  cfg.replicates = 2;
  cfg.bins_min = 5;
  cfg.bins_max = 8;
  cfg.tendencies = {0.0, 0.1};
  const auto pts = run_sweep_bins(cfg);
  ASSERT_EQ(pts.size(), 2u * 2u * 4u);
  for (const auto& p : pts) {
    // |balance| does not depend on M.
    for (const auto& q : pts) {
      if (q.replicate == p.replicate && q.tendency == p.tendency) {
        EXPECT_EQ(q.abs_balance, p.abs_balance);
      }
    }
    if (p.tendency == 0.0) EXPECT_LT(p.abs_balance, 0.1);
  }
  const auto doc = sweep_bins_report(cfg, pts);
  ASSERT_EQ(doc.tables.size(), 1u);
  EXPECT_EQ(doc.tables[0].columns,
            (std::vector<std::string>{"m", "tendency", "replicate", "ece", "abs_balance"}));
  EXPECT_EQ(doc.tables[0].rows.size(), pts.size());
}

TEST(SweepDatasizeTest, SingleReplicateHasNoStd) {
  auto cfg = default_config("sweep-datasize");
  cfg.replicates = 1;
  cfg.sizes = {50, 100};
  const auto r = run_sweep_datasize(cfg);
  EXPECT_NEAR(r.true_ece, 0.025, 1e-12);
  ASSERT_EQ(r.points.size(), 4u);
  for (const auto& p : r.points) EXPECT_FALSE(p.std.has_value());
  const auto doc = sweep_datasize_report(cfg, r);
  EXPECT_EQ(doc.tables[0].columns,
            (std::vector<std::string>{"size", "metric", "mean_abs_error", "std"}));
  const auto j = to_json(doc);
  EXPECT_EQ(j["experiment"], "sweep-datasize");
}

TEST(SweepDatasizeTest, LargeSamplesConverge) {
  auto cfg = default_config("sweep-datasize");
  cfg.replicates = 20;
  cfg.sizes = {10000};
  const auto r = run_sweep_datasize(cfg);
  for (const auto& p : r.points) {
    EXPECT_LT(p.mean_abs_error, 0.01) << p.metric;
    ASSERT_TRUE(p.std.has_value());
  }
}

TEST(TrainEvalTest, ProfileMode) {
  auto cfg = default_config("train-eval");
  cfg.n = 5000;
  cfg.profile = "late";
  const auto r = run_train_eval(cfg);
  EXPECT_EQ(r.mode, "profile");
  EXPECT_EQ(r.train_size, 3000u);
  EXPECT_EQ(r.test_size, 2000u);
  ASSERT_TRUE(r.oracle_binned_ece.has_value());
  ASSERT_TRUE(r.optimal_report.has_value());
  EXPECT_LT(*r.mean_abs_true_gap, 0.05);
  const auto doc = train_eval_report(cfg, r);
  EXPECT_EQ(doc.rows.size(), 3u);
}

TEST(TrainEvalTest, FileMode) {
  const auto dir = std::filesystem::temp_directory_path() / "calibkit_experiments_test";
  write_file(dir / "all.csv", dataset_to_csv(generate_snapshots(1000, TimeProfile::kEarly, 3)));
  auto cfg = default_config("train-eval");
  cfg.train_file = (dir / "all.csv").string();
  const auto r = run_train_eval(cfg);
  EXPECT_EQ(r.mode, "files");
  EXPECT_EQ(r.train_size, 600u);

  cfg.test_file = (dir / "all.csv").string();
  EXPECT_EQ(run_train_eval(cfg).test_size, 1000u);

  cfg.test_file = (dir / "missing.csv").string();
  EXPECT_THROW(run_train_eval(cfg), ContractError);
  cfg.train_file.clear();
  cfg.test_file = (dir / "all.csv").string();
  EXPECT_THROW(run_train_eval(cfg), ContractError);
}

TEST(RunExperimentTest, DeterministicDocuments) {
  for (const char* e : {"case1", "sweep-bins", "sweep-datasize", "train-eval"}) {
    auto cfg = default_config(e);
    cfg.n = 400;
    cfg.replicates = 3;
    cfg.bins_max = 10;
    if (!cfg.sizes.empty()) cfg.sizes = {50, 100};
    const auto a = to_json(run_experiment(cfg)).dump();
    const auto b = to_json(run_experiment(cfg)).dump();
    EXPECT_EQ(a, b) << e;
    cfg.seed += 1;
    cfg.training.seed = cfg.seed;
    EXPECT_NE(to_json(run_experiment(cfg)).dump(), a) << e;
  }
  auto bad = default_config("case1");
  bad.n = 0;
  EXPECT_THROW(run_experiment(bad), ContractError);
}

}  // namespace
}  // namespace calibkit
