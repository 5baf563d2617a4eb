#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "calibkit/snapshot.hpp"

namespace calibkit {

// Per-feature mean and population standard deviation of the training split.
// Zero-variance features are not retained; their weight stays 0.
struct StandardizationStats {
  std::array<double, kSnapshotFeatures> mean{};
  std::array<double, kSnapshotFeatures> std{};
  std::array<bool, kSnapshotFeatures> retained{};
  std::vector<std::string> warnings;
};

StandardizationStats compute_standardization(const SnapshotDataset& train);

struct TrainConfig {
  double learning_rate = 0.1;
  std::size_t max_iters = 10000;
  double tolerance = 1e-10;  // stop once |loss change| falls below this
  double l2 = 0.0;
  std::uint64_t seed = 0;  // split seed; gradient descent starts from zero weights
};

struct TrainingMeta {
  std::size_t iterations = 0;
  double final_loss = 0.0;
  bool converged = false;
  std::vector<double> loss_history;  // loss before each step, then the final loss
};

// Logistic regression on standardized features; weights live on that scale.
struct LogisticModel {
  std::array<double, kSnapshotFeatures> weights{};
  double bias = 0.0;
  StandardizationStats standardization;
  TrainConfig config;
  TrainingMeta meta;
  std::array<std::string, kSnapshotFeatures> feature_names = default_feature_names();
};

// Minimizes mean binary cross-entropy (+ l2/2 |w|^2) by full-batch gradient
// descent with a fixed step. Throws ContractError for single-class data and
// NumericalError after 50 consecutive loss increases.
LogisticModel train(const SnapshotDataset& train, const TrainConfig& cfg = {});

// Output is clamped into the open interval (0, 1). Throws ContractError on a
// non-finite feature.
double predict_proba(const LogisticModel& model, std::span<const double, kSnapshotFeatures> x);
std::vector<double> predict_dataset(const LogisticModel& model, const SnapshotDataset& ds);

// Mean binary cross-entropy of the model on a dataset.
double log_loss(const LogisticModel& model, const SnapshotDataset& ds);

std::string model_to_json(const LogisticModel& model);
// Throws ContractError on a malformed document.
LogisticModel model_from_json(const std::string& text);

}  // namespace calibkit
