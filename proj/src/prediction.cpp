#include "calibkit/prediction.hpp"

#include <cmath>
#include <string>

#include "calibkit/errors.hpp"

namespace calibkit {

Prediction::Prediction(double p_hat, int outcome) : p_hat_(p_hat), outcome_(outcome) {
  if (!std::isfinite(p_hat) || p_hat < 0.0 || p_hat > 1.0) {
    throw ContractError("p_hat must be a finite value in [0, 1], got " +
                        std::to_string(p_hat));
  }
  if (outcome != 0 && outcome != 1) {
    throw ContractError("outcome must be 0 or 1, got " + std::to_string(outcome));
  }
}

PredictionSet PredictionSet::from_columns(std::span<const double> p_hat,
                                          std::span<const int> outcome) {
  if (p_hat.size() != outcome.size()) {
    throw ContractError("p_hat and outcome columns differ in length (" +
                        std::to_string(p_hat.size()) + " vs " +
                        std::to_string(outcome.size()) + ")");
  }
  PredictionSet set;
  set.reserve(p_hat.size());
  for (std::size_t i = 0; i < p_hat.size(); ++i) set.add(Prediction(p_hat[i], outcome[i]));
  return set;
}

}  // namespace calibkit
