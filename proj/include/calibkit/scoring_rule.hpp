#pragma once

#include <string>
#include <string_view>

namespace calibkit {

// Pointwise scoring functions f(p_hat, y).
enum class ScoringRule { kAccuracy, kBrier, kBalance };

// 1 if the prediction lands on the outcome's side of 0.5, else 0. A prediction
// of exactly 0.5 counts as predicting a win.
inline double accuracy_point(double p_hat, int y) {
  return ((p_hat >= 0.5) == (y == 1)) ? 1.0 : 0.0;
}

inline double brier_point(double p_hat, int y) {
  const double d = p_hat - static_cast<double>(y);
  return d * d;
}

// Gain/loss rule: a correct side earns the distance to the outcome's far end,
// a wrong side loses the predicted mass on the losing outcome.
inline double balance_point(double p_hat, int y) {
  if (p_hat >= 0.5) {
    return y == 1 ? 1.0 - p_hat : -p_hat;
  }
  return y == 0 ? p_hat : -1.0 + p_hat;
}

inline double score_point(ScoringRule rule, double p_hat, int y) {
  switch (rule) {
    case ScoringRule::kAccuracy:
      return accuracy_point(p_hat, y);
    case ScoringRule::kBrier:
      return brier_point(p_hat, y);
    case ScoringRule::kBalance:
      return balance_point(p_hat, y);
  }
  return 0.0;
}

std::string to_string(ScoringRule rule);
// Accepts "accuracy", "brier", "balance". Throws ContractError otherwise.
ScoringRule parse_scoring_rule(std::string_view name);

}  // namespace calibkit
