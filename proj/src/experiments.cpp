#include "calibkit/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "calibkit/errors.hpp"
#include "calibkit/parallel.hpp"
#include "calibkit/rng.hpp"
#include "calibkit/summation.hpp"
#include "calibkit/synthetic.hpp"

namespace calibkit {

namespace {

constexpr ScoringRule kRules[] = {ScoringRule::kAccuracy, ScoringRule::kBrier,
                                  ScoringRule::kBalance};

std::string fmt(double x) { return format_double(x); }

std::vector<double> centers(const Histogram& h) {
  std::vector<double> c(h.counts.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.5 * (h.lower[i] + h.upper[i]);
  return c;
}

std::vector<double> as_doubles(const std::vector<std::size_t>& xs) {
  return {xs.begin(), xs.end()};
}

Provenance make_provenance(const ExperimentConfig& cfg) {
  Provenance p;
  p.seed = cfg.seed;
  p.version = CALIBKIT_VERSION;
  p.config = cfg;
  return p;
}

std::vector<std::string> report_cells(const MetricReport& r) {
  return {std::to_string(r.n),
          fmt(r.accuracy),
          fmt(r.brier),
          fmt(r.brier_decomposition.calibration_term),
          fmt(r.brier_decomposition.sharpness_term),
          fmt(r.ece),
          std::to_string(r.ece_bins),
          fmt(r.balance)};
}

const std::vector<std::string> kReportColumns = {
    "n", "accuracy", "brier", "brier_calibration", "brier_sharpness", "ece", "ece_bins", "balance"};

void add_histogram_rows(Table& t, const std::string& condition, const std::string& variable,
                        const Histogram& h) {
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    t.rows.push_back({condition, variable, std::to_string(b + 1), fmt(h.lower[b]),
                      fmt(h.upper[b]), std::to_string(h.counts[b])});
  }
}

}  // namespace

Histogram make_histogram(std::span<const double> values, int bins) {
  if (bins < 1) throw ContractError("histogram needs at least one bin");
  Histogram h;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  for (int b = 0; b < bins; ++b) {
    h.lower.push_back(static_cast<double>(b) / bins);
    h.upper.push_back(static_cast<double>(b + 1) / bins);
  }
  for (double v : values) ++h.counts[static_cast<std::size_t>(bin_of(v, bins))];
  return h;
}

std::vector<Case1Condition> run_case1(const ExperimentConfig& cfg) {
  validate(cfg);
  std::vector<Case1Condition> out(cfg.distributions.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto& c = out[i];
    c.distribution = cfg.distributions[i];
    c.seed = derive_seed(cfg.seed, i);
    const auto model = SyntheticModel::optimal();
    const ScoredBatch batch = generate_batch(c.distribution, model, cfg.n, c.seed);
    c.report = full_report(batch.predictions, cfg.bins);
    for (ScoringRule rule : kRules) {
      c.monte_carlo[to_string(rule)] = mean_with_error(rule, batch.predictions);
      c.quadrature[to_string(rule)] = expected_score_quadrature(rule, c.distribution, model);
    }
    c.quadrature["true_ece"] = true_ece_analytic(c.distribution, model);
    std::vector<double> p_hat;
    p_hat.reserve(batch.predictions.size());
    for (const auto& p : batch.predictions) p_hat.push_back(p.p_hat());
    c.true_p = make_histogram(batch.true_p, cfg.histogram_bins);
    c.p_hat = make_histogram(p_hat, cfg.histogram_bins);
  }
  return out;
}

ReportDocument case1_report(const ExperimentConfig& cfg, const std::vector<Case1Condition>& r) {
  ReportDocument doc;
  doc.experiment = "case1";
  doc.provenance = make_provenance(cfg);

  Table rows{"case1_rows", {"condition"}, {}};
  rows.columns.insert(rows.columns.end(), kReportColumns.begin(), kReportColumns.end());
  Table refs{"case1_references", {"condition", "rule", "method", "value", "std_error"}, {}};
  Table hist{"case1_histograms", {"condition", "variable", "bin", "lower", "upper", "count"}, {}};

  double max_z = 0.0;
  for (const auto& c : r) {
    const std::string cond = c.distribution.name();
    const std::string batch_call = "generate_batch(" + cond + ", optimal, n=" +
                                   std::to_string(cfg.n) + ", seed=" + std::to_string(c.seed) +
                                   ")";
    doc.provenance.calls.push_back(batch_call);

    ReportRow row;
    row.condition = cond;
    row.report = c.report;
    row.source = "full_report(" + batch_call + ", bins=" + std::to_string(cfg.bins) + ")";
    for (const auto& [rule, est] : c.monte_carlo) {
      const double quad = c.quadrature.at(rule);
      row.extras["quadrature_" + rule] = quad;
      row.extras["std_error_" + rule] = est.std_error;
      const double z = est.std_error > 0.0 ? std::fabs(est.mean - quad) / est.std_error : 0.0;
      row.extras["z_" + rule] = z;
      max_z = std::max(max_z, z);

      doc.references.push_back({rule, cond, "optimal", "quadrature", quad, std::nullopt});
      doc.references.push_back({rule, cond, "optimal", "mc", est.mean, est.std_error});
      refs.rows.push_back({cond, rule, "quadrature", fmt(quad), ""});
      refs.rows.push_back({cond, rule, "mc", fmt(est.mean), fmt(est.std_error)});
    }
    const double true_ece = c.quadrature.at("true_ece");
    row.extras["quadrature_true_ece"] = true_ece;
    doc.references.push_back({"true_ece", cond, "optimal", "quadrature", true_ece, std::nullopt});
    refs.rows.push_back({cond, "true_ece", "quadrature", fmt(true_ece), ""});
    doc.rows.push_back(row);

    auto cells = report_cells(c.report);
    cells.insert(cells.begin(), cond);
    rows.rows.push_back(cells);

    doc.series.push_back({cond + " true_p", "p", "count", centers(c.true_p),
                          as_doubles(c.true_p.counts)});
    doc.series.push_back({cond + " p_hat", "p_hat", "count", centers(c.p_hat),
                          as_doubles(c.p_hat.counts)});
    add_histogram_rows(hist, cond, "true_p", c.true_p);
    add_histogram_rows(hist, cond, "p_hat", c.p_hat);
  }
  doc.summary["max_mc_quadrature_z"] = max_z;
  doc.tables = {rows, refs, hist};
  return doc;
}

std::vector<SweepBinsPoint> run_sweep_bins(const ExperimentConfig& cfg) {
  validate(cfg);
  const auto& dist = cfg.distributions.front();
  const std::size_t per_rep =
      cfg.tendencies.size() * static_cast<std::size_t>(cfg.bins_max - cfg.bins_min + 1);
  std::vector<SweepBinsPoint> points(cfg.replicates * per_rep);
  parallel_for(cfg.replicates, [&](std::size_t rep) {
    const std::uint64_t seed = derive_seed(cfg.seed, rep);
    std::size_t k = rep * per_rep;
    for (double t : cfg.tendencies) {
      const auto batch = generate_batch(dist, SyntheticModel::confidence_biased(t), cfg.n, seed);
      const double abs_balance = std::fabs(score_balance(batch.predictions));
      for (int m = cfg.bins_min; m <= cfg.bins_max; ++m) {
        points[k++] = {m, t, rep, score_ece(batch.predictions, m), abs_balance};
      }
    }
  });
  return points;
}

ReportDocument sweep_bins_report(const ExperimentConfig& cfg,
                                 const std::vector<SweepBinsPoint>& points) {
  ReportDocument doc;
  doc.experiment = "sweep-bins";
  doc.provenance = make_provenance(cfg);
  const auto& dist = cfg.distributions.front();

  Table table{"sweep_bins", {"m", "tendency", "replicate", "ece", "abs_balance"}, {}};
  for (const auto& p : points) {
    table.rows.push_back({std::to_string(p.m), fmt(p.tendency), std::to_string(p.replicate),
                          fmt(p.ece), fmt(p.abs_balance)});
  }
  for (std::size_t rep = 0; rep < cfg.replicates; ++rep) {
    for (double t : cfg.tendencies) {
      doc.provenance.calls.push_back(
          "generate_batch(" + dist.name() + ", " +
          SyntheticModel::confidence_biased(t).name() + ", n=" + std::to_string(cfg.n) +
          ", seed=" + std::to_string(derive_seed(cfg.seed, rep)) + ")");
    }
  }

  const int m_count = cfg.bins_max - cfg.bins_min + 1;
  for (double t : cfg.tendencies) {
    const auto model = SyntheticModel::confidence_biased(t);
    std::vector<CompensatedSum> ece_sum(static_cast<std::size_t>(m_count));
    CompensatedSum bal_sum;
    for (const auto& p : points) {
      if (p.tendency != t) continue;
      ece_sum[static_cast<std::size_t>(p.m - cfg.bins_min)].add(p.ece);
      if (p.m == cfg.bins_min) bal_sum.add(p.abs_balance);
    }
    Series ece{"mean ece " + model.name(), "m", "ece", {}, {}};
    Series bal{"mean abs_balance " + model.name(), "m", "abs_balance", {}, {}};
    const double reps = static_cast<double>(cfg.replicates);
    for (int m = cfg.bins_min; m <= cfg.bins_max; ++m) {
      ece.x.push_back(m);
      ece.y.push_back(ece_sum[static_cast<std::size_t>(m - cfg.bins_min)].value() / reps);
      bal.x.push_back(m);
      bal.y.push_back(bal_sum.value() / reps);
    }
    doc.series.push_back(std::move(ece));
    doc.series.push_back(std::move(bal));

    if (model.is_injective()) {
      const double truth = true_ece_analytic(dist, model);
      doc.references.push_back({"true_ece", dist.name(), model.name(), "quadrature", truth,
                                std::nullopt});
      doc.summary["true_ece " + model.name()] = truth;
    }
  }

  // Rank instability: (replicate, M) pairs where the more biased model gets
  // the smaller ECE.
  if (cfg.tendencies.size() == 2) {
    const double lo = std::min(std::fabs(cfg.tendencies[0]), std::fabs(cfg.tendencies[1]));
    std::map<std::pair<std::size_t, int>, std::pair<double, double>> pairs;
    for (const auto& p : points) {
      auto& slot = pairs[{p.replicate, p.m}];
      (std::fabs(p.tendency) == lo ? slot.first : slot.second) = p.ece;
    }
    double crossings = 0;
    for (const auto& [key, v] : pairs) {
      if (v.second < v.first) ++crossings;
    }
    doc.summary["rank_crossings"] = crossings;
  }
  doc.tables = {table};
  return doc;
}

DatasizeResult run_sweep_datasize(const ExperimentConfig& cfg) {
  validate(cfg);
  const auto& dist = cfg.distributions.front();
  const auto model = SyntheticModel::confidence_biased(cfg.tendencies.front());
  DatasizeResult result;
  result.true_ece = true_ece_analytic(dist, model);

  const std::size_t reps = cfg.replicates;
  std::vector<double> ece_err(cfg.sizes.size() * reps);
  std::vector<double> bal_err(cfg.sizes.size() * reps);
  parallel_for(cfg.sizes.size() * reps, [&](std::size_t k) {
    const std::size_t size = cfg.sizes[k / reps];
    const std::uint64_t seed = derive_seed(derive_seed(cfg.seed, size), k % reps);
    const auto batch = generate_batch(dist, model, size, seed);
    ece_err[k] = std::fabs(score_ece(batch.predictions, cfg.bins) - result.true_ece);
    bal_err[k] = std::fabs(std::fabs(score_balance(batch.predictions)) - result.true_ece);
  });

  auto summarize = [&](const std::vector<double>& errs, std::size_t s, const char* metric) {
    CompensatedSum sum;
    for (std::size_t r = 0; r < reps; ++r) sum.add(errs[s * reps + r]);
    DatasizePoint p;
    p.size = cfg.sizes[s];
    p.metric = metric;
    p.mean_abs_error = sum.value() / static_cast<double>(reps);
    if (reps > 1) {
      CompensatedSum sq;
      for (std::size_t r = 0; r < reps; ++r) {
        const double d = errs[s * reps + r] - p.mean_abs_error;
        sq.add(d * d);
      }
      p.std = std::sqrt(sq.value() / static_cast<double>(reps - 1));
    }
    return p;
  };
  for (std::size_t s = 0; s < cfg.sizes.size(); ++s) {
    result.points.push_back(summarize(ece_err, s, "ece"));
    result.points.push_back(summarize(bal_err, s, "balance"));
  }
  return result;
}

ReportDocument sweep_datasize_report(const ExperimentConfig& cfg, const DatasizeResult& r) {
  ReportDocument doc;
  doc.experiment = "sweep-datasize";
  doc.provenance = make_provenance(cfg);
  const auto& dist = cfg.distributions.front();
  const auto model = SyntheticModel::confidence_biased(cfg.tendencies.front());

  Table table{"sweep_datasize", {"size", "metric", "mean_abs_error", "std"}, {}};
  Series ece{"ece mean_abs_error", "size", "mean_abs_error", {}, {}};
  Series bal{"abs_balance mean_abs_error", "size", "mean_abs_error", {}, {}};
  for (const auto& p : r.points) {
    table.rows.push_back({std::to_string(p.size), p.metric, fmt(p.mean_abs_error),
                          p.std ? fmt(*p.std) : ""});
    auto& s = p.metric == "ece" ? ece : bal;
    s.x.push_back(static_cast<double>(p.size));
    s.y.push_back(p.mean_abs_error);
  }
  for (std::size_t size : cfg.sizes) {
    doc.provenance.calls.push_back("generate_batch(" + dist.name() + ", " + model.name() +
                                   ", n=" + std::to_string(size) + ", seed=derive_seed(" +
                                   std::to_string(derive_seed(cfg.seed, size)) + ", 0.." +
                                   std::to_string(cfg.replicates - 1) + "))");
  }
  doc.references.push_back(
      {"true_ece", dist.name(), model.name(), "quadrature", r.true_ece, std::nullopt});
  doc.summary["true_ece"] = r.true_ece;
  doc.series = {ece, bal};
  doc.tables = {table};
  return doc;
}

namespace {

PredictionSet to_predictions(const std::vector<double>& p_hat, const std::vector<int>& y) {
  return PredictionSet::from_columns(p_hat, y);
}

}  // namespace

TrainEvalResult run_train_eval(const ExperimentConfig& cfg) {
  validate(cfg);
  TrainEvalResult r;
  SnapshotDataset train_set;
  SnapshotDataset test_set;
  if (!cfg.train_file.empty()) {
    r.mode = "files";
    auto full = load_dataset(cfg.train_file);
    if (cfg.test_file.empty()) {
      std::tie(train_set, test_set) = split(full, cfg.train_fraction, cfg.seed);
    } else {
      train_set = std::move(full);
      test_set = load_dataset(cfg.test_file);
    }
  } else {
    if (!cfg.test_file.empty()) throw ContractError("a test file needs a train file");
    r.mode = "profile";
    const auto all = generate_snapshots(cfg.n, parse_time_profile(cfg.profile), cfg.seed);
    std::tie(train_set, test_set) = split(all, cfg.train_fraction, cfg.seed);
  }
  if (test_set.size() == 0) throw ContractError("test set is empty");

  TrainConfig tc = cfg.training;
  tc.seed = cfg.seed;
  r.model = train(train_set, tc);
  r.train_size = train_set.size();
  r.test_size = test_set.size();

  const auto train_p = predict_dataset(r.model, train_set);
  const auto test_p = predict_dataset(r.model, test_set);
  r.train_report = full_report(to_predictions(train_p, train_set.outcomes()), cfg.bins);
  r.test_report = full_report(to_predictions(test_p, test_set.outcomes()), cfg.bins);
  r.p_hat = make_histogram(test_p, cfg.histogram_bins);

  if (const auto& truth = test_set.true_p()) {
    const auto preds = to_predictions(test_p, test_set.outcomes());
    // Same bins as ECE, with the observed outcome rate replaced by the mean
    // ground-truth probability.
    std::vector<CompensatedSum> tp(static_cast<std::size_t>(cfg.bins));
    std::vector<CompensatedSum> ph(static_cast<std::size_t>(cfg.bins));
    std::vector<std::size_t> cnt(static_cast<std::size_t>(cfg.bins), 0);
    CompensatedSum gap;
    for (std::size_t i = 0; i < test_p.size(); ++i) {
      const auto b = static_cast<std::size_t>(bin_of(test_p[i], cfg.bins));
      tp[b].add((*truth)[i]);
      ph[b].add(test_p[i]);
      ++cnt[b];
      gap.add(std::fabs(test_p[i] - (*truth)[i]));
    }
    CompensatedSum ece;
    for (std::size_t b = 0; b < cnt.size(); ++b) {
      if (cnt[b] == 0) continue;
      ece.add(std::fabs(tp[b].value() - ph[b].value()));
    }
    const double n = static_cast<double>(test_p.size());
    r.oracle_binned_ece = ece.value() / n;
    r.mean_abs_true_gap = gap.value() / n;
    r.optimal_report = full_report(to_predictions(*truth, test_set.outcomes()), cfg.bins);
  }
  return r;
}

ReportDocument train_eval_report(const ExperimentConfig& cfg, const TrainEvalResult& r) {
  ReportDocument doc;
  doc.experiment = "train-eval";
  doc.provenance = make_provenance(cfg);
  const std::string data =
      r.mode == "profile"
          ? "generate_snapshots(n=" + std::to_string(cfg.n) + ", " + cfg.profile +
                ", seed=" + std::to_string(cfg.seed) + ")"
          : "load_dataset(" + cfg.train_file + ")";
  const std::string split_call = "split(" + data + ", " + format_double(cfg.train_fraction) +
                                 ", seed=" + std::to_string(cfg.seed) + ")";
  const std::string train_call = "train(" + split_call + ".train)";
  doc.provenance.calls = {data, split_call, train_call};
  const std::string test_source =
      cfg.test_file.empty() ? split_call + ".test" : "load_dataset(" + cfg.test_file + ")";

  ReportRow test_row{"test", r.test_report,
                     "full_report(predict_dataset(" + train_call + ", " + test_source +
                         "), bins=" + std::to_string(cfg.bins) + ")",
                     {}};
  if (r.oracle_binned_ece) test_row.extras["oracle_binned_ece"] = *r.oracle_binned_ece;
  if (r.mean_abs_true_gap) test_row.extras["mean_abs_true_gap"] = *r.mean_abs_true_gap;
  test_row.extras["train_size"] = static_cast<double>(r.train_size);
  test_row.extras["test_size"] = static_cast<double>(r.test_size);
  doc.rows.push_back(test_row);
  doc.rows.push_back({"train", r.train_report,
                      "full_report(predict_dataset(" + train_call + ", " + split_call +
                          ".train), bins=" + std::to_string(cfg.bins) + ")",
                      {}});
  if (r.optimal_report) {
    doc.rows.push_back({"test_oracle", *r.optimal_report,
                        "full_report(true_p of " + test_source + ")", {}});
  }

  doc.summary["iterations"] = static_cast<double>(r.model.meta.iterations);
  doc.summary["final_loss"] = r.model.meta.final_loss;
  doc.summary["converged"] = r.model.meta.converged ? 1.0 : 0.0;

  Table rows{"train_eval_rows", {"split"}, {}};
  rows.columns.insert(rows.columns.end(), kReportColumns.begin(), kReportColumns.end());
  for (const auto& row : doc.rows) {
    auto cells = report_cells(row.report);
    cells.insert(cells.begin(), row.condition);
    rows.rows.push_back(cells);
  }
  Table hist{"train_eval_histogram", {"condition", "variable", "bin", "lower", "upper", "count"},
             {}};
  add_histogram_rows(hist, "test", "p_hat", r.p_hat);
  doc.series.push_back({"test p_hat", "p_hat", "count", centers(r.p_hat),
                        as_doubles(r.p_hat.counts)});
  doc.tables = {rows, hist};
  return doc;
}

ReportDocument run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  if (cfg.experiment == "case1") return case1_report(cfg, run_case1(cfg));
  if (cfg.experiment == "sweep-bins") return sweep_bins_report(cfg, run_sweep_bins(cfg));
  if (cfg.experiment == "sweep-datasize") {
    return sweep_datasize_report(cfg, run_sweep_datasize(cfg));
  }
  return train_eval_report(cfg, run_train_eval(cfg));
}

}  // namespace calibkit
