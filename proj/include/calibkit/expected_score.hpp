#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "calibkit/distribution.hpp"
#include "calibkit/quadrature.hpp"
#include "calibkit/scoring_rule.hpp"
#include "calibkit/synthetic.hpp"

namespace calibkit {

// Expected score of predicting q when the true win probability is p:
// p * f(q, 1) + (1 - p) * f(q, 0). Throws ContractError outside [0, 1].
double pointwise_expected(ScoringRule rule, double q, double p);

// Smallest p with model(p) >= 0.5, found by bisection on the monotone map.
// Rule integrands switch branch there.
double branch_preimage(const SyntheticModel& model);

// Expected score of a deterministic model under an operating condition,
// integrating pointwise_expected(rule, model(p), p) against the density.
double expected_score_quadrature(ScoringRule rule, const ProbDistribution& dist,
                                 const SyntheticModel& model, const QuadratureSpec& spec = {});

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

// Mean of the rule over generate_batch(dist, model, n, seed). n >= 2.
McEstimate expected_score_mc(ScoringRule rule, const ProbDistribution& dist,
                             const SyntheticModel& model, std::size_t n, std::uint64_t seed);

// Sample mean and standard error of a rule over an existing prediction set.
McEstimate mean_with_error(ScoringRule rule, const PredictionSet& preds);

// True expected calibration error of a deterministic, injective model:
// E|model(p) - p|. Throws ContractError ("conditional frequency undefined")
// for many-to-one maps (|t| = 1).
double true_ece_analytic(const ProbDistribution& dist, const SyntheticModel& model,
                         const QuadratureSpec& spec = {});

// |t| / 4: true ECE of a tendency-t model when p is uniform.
inline double true_ece_uniform_closed_form(double tendency) {
  return (tendency < 0.0 ? -tendency : tendency) / 4.0;
}

// One emitted expected-score result.
struct ExpectedScoreRecord {
  std::string rule;
  std::string distribution;
  std::string model;
  std::string method;  // "quadrature", "mc" or "closed_form"
  double value = 0.0;
  std::optional<double> std_error;
};

}  // namespace calibkit
