#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "calibkit/distribution.hpp"
#include "calibkit/prediction.hpp"

namespace calibkit {

// Deterministic response channel p -> p_hat.
//
// A positive tendency t mixes the truth with the nearer extreme,
// (1-t)p + t*[p >= 0.5], i.e. an overconfident model. A negative tendency
// shrinks toward 0.5, (1-|t|)p + |t|/2, i.e. an underconfident model. t = 0 is
// the optimal model.
class SyntheticModel {
 public:
  static SyntheticModel optimal() { return SyntheticModel(0.0); }
  // Throws ContractError unless t is finite and in [-1, 1].
  static SyntheticModel confidence_biased(double tendency);

  double tendency() const { return tendency_; }
  bool is_optimal() const { return tendency_ == 0.0; }
  // True when distinct p always map to distinct p_hat (|t| < 1).
  bool is_injective() const { return tendency_ > -1.0 && tendency_ < 1.0; }

  // No range check; apply_model() is the validating entry point.
  double map(double p) const {
    if (tendency_ > 0.0) {
      return (1.0 - tendency_) * p + tendency_ * (p >= 0.5 ? 1.0 : 0.0);
    }
    if (tendency_ < 0.0) {
      const double s = -tendency_;
      return (1.0 - s) * p + s * 0.5;
    }
    return p;
  }

  // "optimal" or "tendency(0.1)"; parse_model also accepts a bare number.
  std::string name() const;

  friend bool operator==(const SyntheticModel&, const SyntheticModel&) = default;

 private:
  explicit SyntheticModel(double t) : tendency_(t) {}
  double tendency_;
};

SyntheticModel parse_model(std::string_view text);

// Prediction set together with the hidden ground truth that produced it.
struct ScoredBatch {
  std::vector<double> true_p;
  PredictionSet predictions;
  std::uint64_t seed = 0;
};

// n i.i.d. draws; item i depends only on (seed, i).
std::vector<double> sample_probs(const ProbDistribution& dist, std::size_t n,
                                 std::uint64_t seed);

// Throws ContractError unless p is in [0, 1].
double apply_model(const SyntheticModel& model, double p);

// Draws p from dist, y ~ Bernoulli(p) and p_hat = model(p). The p and y draws
// use separate streams keyed by seed, so the same seed with a different model
// reproduces the same p and y.
ScoredBatch generate_batch(const ProbDistribution& dist, const SyntheticModel& model,
                           std::size_t n, std::uint64_t seed);

}  // namespace calibkit
