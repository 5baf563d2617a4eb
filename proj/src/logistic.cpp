#include "calibkit/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>

#include "calibkit/errors.hpp"
#include "calibkit/summation.hpp"

namespace calibkit {

namespace {

constexpr std::size_t kDivergencePatience = 50;

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void validate(const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0) || cfg.max_iters == 0 || !(cfg.tolerance > 0.0) ||
      !(cfg.l2 >= 0.0)) {
    throw ContractError("training config needs positive learning_rate, max_iters, tolerance "
                        "and a non-negative l2");
  }
}

}  // namespace

StandardizationStats compute_standardization(const SnapshotDataset& train) {
  if (train.size() == 0) throw ContractError("cannot standardize an empty dataset");
  StandardizationStats s;
  const double n = static_cast<double>(train.size());
  for (std::size_t j = 0; j < kSnapshotFeatures; ++j) {
    CompensatedSum sum;
    for (std::size_t i = 0; i < train.size(); ++i) sum.add(train.row(i)[j]);
    const double mean = sum.value() / n;
    CompensatedSum sq;
    for (std::size_t i = 0; i < train.size(); ++i) {
      const double d = train.row(i)[j] - mean;
      sq.add(d * d);
    }
    const double sd = std::sqrt(sq.value() / n);
    s.mean[j] = mean;
    s.std[j] = sd;
    s.retained[j] = sd > 1e-12 * std::max(1.0, std::fabs(mean));
    if (!s.retained[j]) {
      s.warnings.push_back("feature '" + train.feature_names()[j] +
                           "' has zero variance in the training split and was dropped");
    }
  }
  return s;
}

LogisticModel train(const SnapshotDataset& data, const TrainConfig& cfg) {
  validate(cfg);
  const std::size_t n = data.size();
  if (n == 0) throw ContractError("training set is empty");
  const auto& y = data.outcomes();
  const auto positives = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
  if (positives == 0 || positives == n) {
    throw ContractError("training set contains a single class; logistic regression needs both");
  }

  LogisticModel model;
  model.config = cfg;
  model.feature_names = data.feature_names();
  model.standardization = compute_standardization(data);
  const auto& st = model.standardization;

  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < kSnapshotFeatures; ++j) {
    if (st.retained[j]) cols.push_back(j);
  }
  const std::size_t k = cols.size();
  std::vector<double> x(n * k);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = data.row(i);
    for (std::size_t c = 0; c < k; ++c) {
      const std::size_t j = cols[c];
      x[i * k + c] = (r[j] - st.mean[j]) / st.std[j];
    }
  }

  std::vector<double> w(k, 0.0);
  double b = 0.0;
  std::vector<double> grad(k);
  const double inv_n = 1.0 / static_cast<double>(n);
  auto& meta = model.meta;
  std::size_t rising = 0;
  double prev_loss = std::numeric_limits<double>::infinity();

  for (std::size_t iter = 0;; ++iter) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_b = 0.0;
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double* xi = &x[i * k];
      double z = b;
      for (std::size_t c = 0; c < k; ++c) z += w[c] * xi[c];
      // One exp serves both the loss and the residual.
      const double e = std::exp(-std::fabs(z));
      loss += std::max(z, 0.0) + std::log1p(e) - y[i] * z;
      const double p = z >= 0.0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
      const double r = p - y[i];
      grad_b += r;
      for (std::size_t c = 0; c < k; ++c) grad[c] += r * xi[c];
    }
    loss *= inv_n;
    double penalty = 0.0;
    for (double v : w) penalty += v * v;
    loss += 0.5 * cfg.l2 * penalty;
    meta.loss_history.push_back(loss);

    if (!std::isfinite(loss)) {
      throw NumericalError("training loss became non-finite; try a smaller learning rate");
    }
    if (iter > 0) {
      rising = loss > prev_loss ? rising + 1 : 0;
      if (rising >= kDivergencePatience) {
        throw NumericalError("training diverged: loss increased for 50 consecutive steps; "
                             "try a smaller learning rate");
      }
      if (std::fabs(prev_loss - loss) < cfg.tolerance) {
        meta.converged = true;
        meta.iterations = iter;
        meta.final_loss = loss;
        break;
      }
    }
    if (iter == cfg.max_iters) {
      meta.iterations = iter;
      meta.final_loss = loss;
      break;
    }
    prev_loss = loss;
    for (std::size_t c = 0; c < k; ++c) {
      w[c] -= cfg.learning_rate * (grad[c] * inv_n + cfg.l2 * w[c]);
    }
    b -= cfg.learning_rate * grad_b * inv_n;
  }

  model.weights.fill(0.0);
  for (std::size_t c = 0; c < k; ++c) model.weights[cols[c]] = w[c];
  model.bias = b;
  return model;
}

double predict_proba(const LogisticModel& model, std::span<const double, kSnapshotFeatures> x) {
  const auto& st = model.standardization;
  double z = model.bias;
  for (std::size_t j = 0; j < kSnapshotFeatures; ++j) {
    if (!std::isfinite(x[j])) {
      throw ContractError("feature '" + model.feature_names[j] + "' is not finite");
    }
    if (st.retained[j]) z += model.weights[j] * (x[j] - st.mean[j]) / st.std[j];
  }
  constexpr double kLow = std::numeric_limits<double>::min();
  constexpr double kHigh = 1.0 - 0x1.0p-53;
  return std::clamp(sigmoid(z), kLow, kHigh);
}

std::vector<double> predict_dataset(const LogisticModel& model, const SnapshotDataset& ds) {
  std::vector<double> out(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) out[i] = predict_proba(model, ds.row(i));
  return out;
}

double log_loss(const LogisticModel& model, const SnapshotDataset& ds) {
  if (ds.size() == 0) throw ContractError("empty dataset");
  CompensatedSum sum;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const double p = predict_proba(model, ds.row(i));
    sum.add(ds.outcomes()[i] ? -std::log(p) : -std::log1p(-p));
  }
  return sum.value() / static_cast<double>(ds.size());
}

std::string model_to_json(const LogisticModel& m) {
  nlohmann::json j;
  j["feature_names"] = m.feature_names;
  j["weights"] = m.weights;
  j["bias"] = m.bias;
  j["standardization"] = {{"mean", m.standardization.mean},
                          {"std", m.standardization.std},
                          {"retained", m.standardization.retained},
                          {"warnings", m.standardization.warnings}};
  j["config"] = {{"learning_rate", m.config.learning_rate},
                 {"max_iters", m.config.max_iters},
                 {"tolerance", m.config.tolerance},
                 {"l2", m.config.l2},
                 {"seed", m.config.seed}};
  j["meta"] = {{"iterations", m.meta.iterations},
               {"final_loss", m.meta.final_loss},
               {"converged", m.meta.converged}};
  return j.dump(2);
}

LogisticModel model_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    LogisticModel m;
    m.feature_names = j.at("feature_names").get<std::array<std::string, kSnapshotFeatures>>();
    m.weights = j.at("weights").get<std::array<double, kSnapshotFeatures>>();
    m.bias = j.at("bias").get<double>();
    const auto& s = j.at("standardization");
    m.standardization.mean = s.at("mean").get<std::array<double, kSnapshotFeatures>>();
    m.standardization.std = s.at("std").get<std::array<double, kSnapshotFeatures>>();
    m.standardization.retained = s.at("retained").get<std::array<bool, kSnapshotFeatures>>();
    m.standardization.warnings = s.value("warnings", std::vector<std::string>{});
    const auto& c = j.at("config");
    m.config.learning_rate = c.at("learning_rate").get<double>();
    m.config.max_iters = c.at("max_iters").get<std::size_t>();
    m.config.tolerance = c.at("tolerance").get<double>();
    m.config.l2 = c.at("l2").get<double>();
    m.config.seed = c.at("seed").get<std::uint64_t>();
    const auto& meta = j.at("meta");
    m.meta.iterations = meta.at("iterations").get<std::size_t>();
    m.meta.final_loss = meta.at("final_loss").get<double>();
    m.meta.converged = meta.at("converged").get<bool>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ContractError(std::string("malformed model document: ") + e.what());
  }
}

}  // namespace calibkit
