#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "calibkit/config.hpp"
#include "calibkit/expected_score.hpp"
#include "calibkit/logistic.hpp"
#include "calibkit/metrics.hpp"
#include "calibkit/report.hpp"

namespace calibkit {

// Equal-width counts over [0, 1]; bin assignment matches compute_bins.
struct Histogram {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<std::size_t> counts;
};
Histogram make_histogram(std::span<const double> values, int bins);

// Optimal-model simulation under one operating condition.
struct Case1Condition {
  ProbDistribution distribution{1.0, 1.0};
  std::uint64_t seed = 0;
  MetricReport report;
  std::map<std::string, McEstimate> monte_carlo;  // by rule name
  std::map<std::string, double> quadrature;       // by rule name, plus "true_ece"
  Histogram true_p;
  Histogram p_hat;
};
std::vector<Case1Condition> run_case1(const ExperimentConfig& cfg);

struct SweepBinsPoint {
  int m = 0;
  double tendency = 0.0;
  std::size_t replicate = 0;
  double ece = 0.0;
  double abs_balance = 0.0;
};
// Replicate r draws one batch (seed derived from (seed, r)) shared by every
// tendency and every M.
std::vector<SweepBinsPoint> run_sweep_bins(const ExperimentConfig& cfg);

struct DatasizePoint {
  std::size_t size = 0;
  std::string metric;  // "ece" or "balance" (absolute value)
  double mean_abs_error = 0.0;
  std::optional<double> std;  // absent with a single replicate
};
struct DatasizeResult {
  double true_ece = 0.0;
  std::vector<DatasizePoint> points;
};
DatasizeResult run_sweep_datasize(const ExperimentConfig& cfg);

struct TrainEvalResult {
  std::string mode;  // "profile" or "files"
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  LogisticModel model;
  MetricReport train_report;
  MetricReport test_report;
  Histogram p_hat;
  // Present when the test data carries ground-truth probabilities.
  std::optional<double> oracle_binned_ece;  // bins of p_hat, gap to mean true_p
  std::optional<double> mean_abs_true_gap;  // mean |p_hat - true_p|
  std::optional<MetricReport> optimal_report;  // true_p used as the prediction
};
TrainEvalResult run_train_eval(const ExperimentConfig& cfg);

ReportDocument case1_report(const ExperimentConfig& cfg, const std::vector<Case1Condition>& r);
ReportDocument sweep_bins_report(const ExperimentConfig& cfg,
                                 const std::vector<SweepBinsPoint>& points);
ReportDocument sweep_datasize_report(const ExperimentConfig& cfg, const DatasizeResult& r);
ReportDocument train_eval_report(const ExperimentConfig& cfg, const TrainEvalResult& r);

// Validates the config, runs the experiment it names and builds its report.
ReportDocument run_experiment(const ExperimentConfig& cfg);

}  // namespace calibkit
