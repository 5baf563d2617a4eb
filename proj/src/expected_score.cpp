#include "calibkit/expected_score.hpp"

#include <cmath>

#include "calibkit/errors.hpp"
#include "calibkit/summation.hpp"

namespace calibkit {

namespace {

double expected_unchecked(ScoringRule rule, double q, double p) {
  return p * score_point(rule, q, 1) + (1.0 - p) * score_point(rule, q, 0);
}

}  // namespace

double pointwise_expected(ScoringRule rule, double q, double p) {
  if (!(q >= 0.0 && q <= 1.0) || !(p >= 0.0 && p <= 1.0)) {
    throw ContractError("pointwise_expected needs q and p in [0, 1], got q=" +
                        format_double(q) + ", p=" + format_double(p));
  }
  return expected_unchecked(rule, q, p);
}

double branch_preimage(const SyntheticModel& model) {
  if (model.map(0.0) >= 0.5) return 0.0;
  if (model.map(1.0) < 0.5) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = lo + (hi - lo) / 2.0;
    if (mid <= lo || mid >= hi) break;
    (model.map(mid) >= 0.5 ? hi : lo) = mid;
  }
  return hi;
}

double expected_score_quadrature(ScoringRule rule, const ProbDistribution& dist,
                                 const SyntheticModel& model, const QuadratureSpec& spec) {
  auto integrand = [&](double p) { return expected_unchecked(rule, model.map(p), p); };
  return integrate_against(dist, integrand, branch_preimage(model), spec).value;
}

McEstimate mean_with_error(ScoringRule rule, const PredictionSet& preds) {
  if (preds.size() < 2) throw ContractError("standard error needs at least 2 samples");
  CompensatedSum sum;
  for (const auto& x : preds) sum.add(score_point(rule, x.p_hat(), x.outcome()));
  const double n = static_cast<double>(preds.size());
  const double mean = sum.value() / n;
  CompensatedSum sq;
  for (const auto& x : preds) {
    const double d = score_point(rule, x.p_hat(), x.outcome()) - mean;
    sq.add(d * d);
  }
  const double var = sq.value() / (n - 1.0);
  return {mean, std::sqrt(var / n), preds.size()};
}

McEstimate expected_score_mc(ScoringRule rule, const ProbDistribution& dist,
                             const SyntheticModel& model, std::size_t n, std::uint64_t seed) {
  if (n < 2) throw ContractError("Monte Carlo estimate needs n >= 2");
  return mean_with_error(rule, generate_batch(dist, model, n, seed).predictions);
}

double true_ece_analytic(const ProbDistribution& dist, const SyntheticModel& model,
                         const QuadratureSpec& spec) {
  if (!model.is_injective()) {
    throw ContractError("conditional frequency undefined for many-to-one model " + model.name());
  }
  // An injective map gives Prob(Y = 1 | p_hat = model(p)) = p.
  auto integrand = [&](double p) { return std::fabs(model.map(p) - p); };
  return integrate_against(dist, integrand, branch_preimage(model), spec).value;
}

}  // namespace calibkit
