#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "calibkit/errors.hpp"
#include "calibkit/expected_score.hpp"
#include "calibkit/experiments.hpp"
#include "calibkit/io.hpp"
#include "calibkit/logistic.hpp"
#include "calibkit/metrics.hpp"
#include "calibkit/snapshot.hpp"
#include "calibkit/synthetic.hpp"

namespace py = pybind11;
using namespace calibkit;

namespace {

py::object to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

PredictionSet as_set(const std::vector<double>& p_hat, const std::vector<int>& outcome) {
  return PredictionSet::from_columns(p_hat, outcome);
}

ScoringRule rule_of(const std::string& name) { return parse_scoring_rule(name); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Calibration metrics, expected scores and synthetic experiments";
  m.attr("__version__") = CALIBKIT_VERSION;

  py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  // Metrics take parallel p_hat / outcome sequences.
  m.def("score_accuracy", [](const std::vector<double>& p, const std::vector<int>& y) {
    return score_accuracy(as_set(p, y));
  }, py::arg("p_hat"), py::arg("outcome"));
  m.def("score_brier", [](const std::vector<double>& p, const std::vector<int>& y) {
    return score_brier(as_set(p, y));
  }, py::arg("p_hat"), py::arg("outcome"));
  m.def("decompose_brier", [](const std::vector<double>& p, const std::vector<int>& y) {
    return to_py(to_json(decompose_brier(as_set(p, y))));
  }, py::arg("p_hat"), py::arg("outcome"));
  m.def("score_balance", [](const std::vector<double>& p, const std::vector<int>& y) {
    return score_balance(as_set(p, y));
  }, py::arg("p_hat"), py::arg("outcome"));
  m.def("score_ece", [](const std::vector<double>& p, const std::vector<int>& y, int bins) {
    return score_ece(as_set(p, y), bins);
  }, py::arg("p_hat"), py::arg("outcome"), py::arg("bins") = 10);
  m.def("score_mce", [](const std::vector<double>& p, const std::vector<int>& y, int bins) {
    return score_mce(as_set(p, y), bins);
  }, py::arg("p_hat"), py::arg("outcome"), py::arg("bins") = 10);
  m.def("compute_bins", [](const std::vector<double>& p, const std::vector<int>& y, int bins) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& b : compute_bins(as_set(p, y), bins)) out.push_back(to_json(b));
    return to_py(out);
  }, py::arg("p_hat"), py::arg("outcome"), py::arg("bins") = 10);
  m.def("full_report", [](const std::vector<double>& p, const std::vector<int>& y, int bins) {
    return to_py(to_json(full_report(as_set(p, y), bins)));
  }, py::arg("p_hat"), py::arg("outcome"), py::arg("bins") = 10);
  m.def("load_predictions", [](const std::string& path) {
    const auto set = load_predictions(path);
    std::vector<double> p;
    std::vector<int> y;
    for (const auto& x : set) {
      p.push_back(x.p_hat());
      y.push_back(x.outcome());
    }
    return py::make_tuple(p, y);
  }, py::arg("path"));

  py::class_<ProbDistribution>(m, "Distribution")
      .def(py::init<double, double>(), py::arg("alpha"), py::arg("beta"))
      .def_static("uniform", &ProbDistribution::uniform)
      .def_static("parse", [](const std::string& s) { return parse_distribution(s); })
      .def_property_readonly("alpha", &ProbDistribution::alpha)
      .def_property_readonly("beta", &ProbDistribution::beta)
      .def("mean", &ProbDistribution::mean)
      .def("variance", &ProbDistribution::variance)
      .def("density", &ProbDistribution::density)
      .def("__repr__", &ProbDistribution::name);

  py::class_<SyntheticModel>(m, "Model")
      .def_static("optimal", &SyntheticModel::optimal)
      .def_static("confidence_biased", &SyntheticModel::confidence_biased, py::arg("tendency"))
      .def_static("parse", [](const std::string& s) { return parse_model(s); })
      .def_property_readonly("tendency", &SyntheticModel::tendency)
      .def("__call__", [](const SyntheticModel& model, double p) { return apply_model(model, p); })
      .def("__repr__", &SyntheticModel::name);

  m.def("generate_batch", [](const ProbDistribution& d, const SyntheticModel& model, std::size_t n,
                             std::uint64_t seed) {
    const auto b = generate_batch(d, model, n, seed);
    std::vector<double> p;
    std::vector<int> y;
    for (const auto& x : b.predictions) {
      p.push_back(x.p_hat());
      y.push_back(x.outcome());
    }
    py::dict out;
    out["true_p"] = b.true_p;
    out["p_hat"] = p;
    out["outcome"] = y;
    out["seed"] = b.seed;
    return out;
  }, py::arg("distribution"), py::arg("model"), py::arg("n"), py::arg("seed") = kDefaultSeed);

  m.def("expected_score", [](const std::string& rule, const ProbDistribution& d,
                             const SyntheticModel& model) {
    return expected_score_quadrature(rule_of(rule), d, model);
  }, py::arg("rule"), py::arg("distribution"), py::arg("model"));
  m.def("expected_score_mc", [](const std::string& rule, const ProbDistribution& d,
                                const SyntheticModel& model, std::size_t n, std::uint64_t seed) {
    const auto est = expected_score_mc(rule_of(rule), d, model, n, seed);
    return py::make_tuple(est.mean, est.std_error);
  }, py::arg("rule"), py::arg("distribution"), py::arg("model"), py::arg("n") = 100000,
     py::arg("seed") = kDefaultSeed);
  m.def("true_ece", [](const ProbDistribution& d, const SyntheticModel& model) {
    return true_ece_analytic(d, model);
  }, py::arg("distribution"), py::arg("model"));
  m.def("pointwise_expected", [](const std::string& rule, double q, double p) {
    return pointwise_expected(rule_of(rule), q, p);
  }, py::arg("rule"), py::arg("q"), py::arg("p"));

  py::class_<SnapshotDataset>(m, "SnapshotDataset")
      .def_static("load", [](const std::string& path) { return load_dataset(path); })
      .def_static("generate", [](std::size_t n, const std::string& profile, std::uint64_t seed) {
        return generate_snapshots(n, parse_time_profile(profile), seed);
      }, py::arg("n"), py::arg("profile") = "mid", py::arg("seed") = kDefaultSeed)
      .def("__len__", &SnapshotDataset::size)
      .def_property_readonly("outcomes", &SnapshotDataset::outcomes)
      .def_property_readonly("true_p", &SnapshotDataset::true_p)
      .def_property_readonly("feature_names", &SnapshotDataset::feature_names)
      .def("row", [](const SnapshotDataset& ds, std::size_t i) {
        if (i >= ds.size()) throw py::index_error();
        const auto r = ds.row(i);
        return std::vector<double>(r.begin(), r.end());
      })
      .def("split", [](const SnapshotDataset& ds, double fraction, std::uint64_t seed) {
        return split(ds, fraction, seed);
      }, py::arg("train_fraction") = 0.6, py::arg("seed") = kDefaultSeed)
      .def("to_csv", &dataset_to_csv);

  py::class_<LogisticModel>(m, "LogisticModel")
      .def_static("from_json", &model_from_json)
      .def("to_json", &model_to_json)
      .def("predict", &predict_dataset)
      .def("log_loss", &log_loss)
      .def_property_readonly("iterations", [](const LogisticModel& lm) { return lm.meta.iterations; })
      .def_property_readonly("converged", [](const LogisticModel& lm) { return lm.meta.converged; });

  m.def("train", [](const SnapshotDataset& ds, double lr, std::size_t max_iters, double tol,
                    double l2) {
    TrainConfig cfg;
    cfg.learning_rate = lr;
    cfg.max_iters = max_iters;
    cfg.tolerance = tol;
    cfg.l2 = l2;
    py::gil_scoped_release release;
    return train(ds, cfg);
  }, py::arg("dataset"), py::arg("learning_rate") = 0.1, py::arg("max_iters") = 10000,
     py::arg("tolerance") = 1e-10, py::arg("l2") = 0.0);

  // Experiments are driven by the same key-value text the CLI reads.
  m.def("default_config", [](const std::string& name) { return config_to_text(default_config(name)); },
        py::arg("experiment"));
  m.def("run_experiment", [](const std::string& config_text) {
    const auto cfg = parse_config_text(config_text);
    ReportDocument doc;
    {
      py::gil_scoped_release release;
      doc = run_experiment(cfg);
    }
    return to_py(to_json(doc));
  }, py::arg("config_text"));
}
