#include "calibkit/expected_score.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "calibkit/errors.hpp"

namespace calibkit {
namespace {

// Test-only oracle: midpoint rule on a fine uniform grid. Valid for
// densities bounded on [0, 1] (alpha, beta >= 1).
double midpoint_oracle(ScoringRule rule, const ProbDistribution& dist,
                       const SyntheticModel& model, int cells = 2000000) {
  double sum = 0.0;
  const double h = 1.0 / cells;
  for (int i = 0; i < cells; ++i) {
    const double p = (i + 0.5) * h;
    const double q = model.map(p);
    const double f1 = score_point(rule, q, 1);
    const double f0 = score_point(rule, q, 0);
    sum += (p * f1 + (1.0 - p) * f0) * dist.density(p);
  }
  return sum * h;
}

TEST(PointwiseExpectedTest, Examples) {
  EXPECT_EQ(pointwise_expected(ScoringRule::kBalance, 0.8, 0.8), 0.0);
  EXPECT_NEAR(pointwise_expected(ScoringRule::kBalance, 0.7, 0.6), -0.1, 1e-15);
  EXPECT_NEAR(pointwise_expected(ScoringRule::kBrier, 0.5, 0.5), 0.25, 1e-15);
  EXPECT_THROW(pointwise_expected(ScoringRule::kBrier, 1.5, 0.5), ContractError);
  EXPECT_THROW(pointwise_expected(ScoringRule::kBrier, 0.5, -0.5), ContractError);
}

TEST(PointwiseExpectedTest, BalanceIdentitiesOnGrid) {
  for (int i = 0; i <= 100; ++i) {
    const double p = i / 100.0;
    ASSERT_LT(std::fabs(pointwise_expected(ScoringRule::kBalance, p, p)), 1e-15) << p;
    for (int j = 0; j <= 100; ++j) {
      const double q = j / 100.0;
      const double g = pointwise_expected(ScoringRule::kBalance, q, p);
      ASSERT_LT(std::fabs(std::fabs(g) - std::fabs(q - p)), 1e-15) << q << " " << p;
      // Sign: p - q on the win side, q - p on the loss side.
      ASSERT_LT(std::fabs(g - (q >= 0.5 ? p - q : q - p)), 1e-15);
    }
  }
}

TEST(PointwiseExpectedTest, BrierIsMinimizedByTruth) {
  for (int i = 0; i <= 100; ++i) {
    const double p = i / 100.0;
    double best_q = -1.0;
    double best = 1e9;
    for (int j = 0; j <= 1000; ++j) {
      const double q = j / 1000.0;
      const double v = pointwise_expected(ScoringRule::kBrier, q, p);
      if (v < best - 1e-15) {
        best = v;
        best_q = q;
      }
    }
    EXPECT_NEAR(best_q, p, 1e-3 / 2 + 1e-12) << p;
  }
}

TEST(QuadratureTest, OptimalModelClosedForms) {
  const auto opt = SyntheticModel::optimal();
  const ProbDistribution arcsine(0.5, 0.5), uniform(1, 1), bell(2, 2);
  EXPECT_NEAR(expected_score_quadrature(ScoringRule::kAccuracy, uniform, opt), 0.75, 1e-9);
  EXPECT_NEAR(expected_score_quadrature(ScoringRule::kAccuracy, arcsine, opt),
              0.5 + 1.0 / std::numbers::pi, 1e-9);
  EXPECT_NEAR(expected_score_quadrature(ScoringRule::kAccuracy, bell, opt), 0.6875, 1e-9);
  // Brier of the optimal model is E[p(1-p)] = ab / ((a+b)(a+b+1)).
  EXPECT_NEAR(expected_score_quadrature(ScoringRule::kBrier, uniform, opt), 1.0 / 6.0, 1e-9);
  EXPECT_NEAR(expected_score_quadrature(ScoringRule::kBrier, arcsine, opt), 0.125, 1e-9);
  EXPECT_NEAR(expected_score_quadrature(ScoringRule::kBrier, bell, opt), 0.2, 1e-9);
  for (const auto& d : {arcsine, uniform, bell, ProbDistribution(3.0, 0.7)}) {
    EXPECT_NEAR(expected_score_quadrature(ScoringRule::kBalance, d, opt), 0.0, 1e-12);
  }
}

TEST(QuadratureTest, AgreesWithMidpointOracle) {
  for (const auto& d : {ProbDistribution(1, 1), ProbDistribution(2, 2), ProbDistribution(2, 5)}) {
    for (double t : {0.0, 0.1, -0.3, 0.7}) {
      const auto m = SyntheticModel::confidence_biased(t);
      for (auto rule : {ScoringRule::kAccuracy, ScoringRule::kBrier, ScoringRule::kBalance}) {
        EXPECT_NEAR(expected_score_quadrature(rule, d, m), midpoint_oracle(rule, d, m), 1e-7)
            << d.name() << " t=" << t << " " << to_string(rule);
      }
    }
  }
}

TEST(QuadratureTest, DoublingNodesIsStable) {
  const auto m = SyntheticModel::confidence_biased(0.1);
  for (const auto& d : {ProbDistribution(0.5, 0.5), ProbDistribution(1, 1), ProbDistribution(2, 2)}) {
    for (auto rule : {ScoringRule::kAccuracy, ScoringRule::kBrier, ScoringRule::kBalance}) {
      auto h = [&](double p) { return pointwise_expected(rule, m.map(p), p); };
      const auto r = integrate_against(d, h, branch_preimage(m));
      EXPECT_LT(r.last_change, 1e-6);
      QuadratureSpec finer;
      finer.nodes = 2 * r.nodes;
      EXPECT_NEAR(integrate_against(d, h, branch_preimage(m), finer).value, r.value, 1e-6);
    }
  }
}

TEST(QuadratureTest, ReportsNonConvergence) {
  QuadratureSpec spec;
  spec.nodes = 64;
  spec.max_nodes = 256;
  // Step at 0.3 while the panel boundary sits at 0.5.
  auto step = [](double p) { return p < 0.3 ? 1.0 : 0.0; };
  EXPECT_THROW(integrate_against(ProbDistribution::uniform(), step, 0.5, spec), NumericalError);
  spec.nodes = 32;
  EXPECT_THROW(integrate_against(ProbDistribution::uniform(), step, 0.5, spec), ContractError);
}

TEST(QuadratureTest, BranchPreimage) {
  EXPECT_EQ(branch_preimage(SyntheticModel::optimal()), 0.5);
  EXPECT_NEAR(branch_preimage(SyntheticModel::confidence_biased(0.1)), 0.5, 1e-15);
  EXPECT_NEAR(branch_preimage(SyntheticModel::confidence_biased(-0.6)), 0.5, 1e-15);
}

TEST(MonteCarloTest, ArcsineAccuracy) {
  const auto est = expected_score_mc(ScoringRule::kAccuracy, {0.5, 0.5}, SyntheticModel::optimal(),
                                     100000, 2023);
  EXPECT_NEAR(est.mean, 0.5 + 1.0 / std::numbers::pi, 3.0 * est.std_error);
  EXPECT_NEAR(est.mean, 0.8183, 0.005);
}

TEST(MonteCarloTest, Beta22Brier) {
  const auto est = expected_score_mc(ScoringRule::kBrier, {2.0, 2.0}, SyntheticModel::optimal(),
                                     100000, 2023);
  EXPECT_NEAR(est.mean, 0.2, 4.0 * est.std_error);
}

TEST(MonteCarloTest, OverconfidentBalance) {
  const auto est = expected_score_mc(ScoringRule::kBalance, ProbDistribution::uniform(),
                                     SyntheticModel::confidence_biased(0.1), 100000, 2023);
  EXPECT_NEAR(est.mean, -0.025, 4.0 * est.std_error);
  EXPECT_THROW(expected_score_mc(ScoringRule::kBalance, ProbDistribution::uniform(),
                                 SyntheticModel::optimal(), 1, 1),
               ContractError);
}

TEST(TrueEceTest, Values) {
  const auto u = ProbDistribution::uniform();
  EXPECT_NEAR(true_ece_analytic(u, SyntheticModel::confidence_biased(0.1)), 0.025, 1e-12);
  EXPECT_NEAR(true_ece_analytic(u, SyntheticModel::confidence_biased(0.11)), 0.0275, 1e-12);
  EXPECT_EQ(true_ece_uniform_closed_form(0.1), 0.025);
  EXPECT_NEAR(true_ece_uniform_closed_form(0.11), 0.0275, 1e-17);
  for (const auto& d : {ProbDistribution(0.5, 0.5), u, ProbDistribution(2, 2)}) {
    EXPECT_EQ(true_ece_analytic(d, SyntheticModel::optimal()), 0.0);
  }
}

TEST(TrueEceTest, ManyToOneMapIsRejected) {
  try {
    true_ece_analytic(ProbDistribution::uniform(), SyntheticModel::confidence_biased(1.0));
    FAIL() << "expected ContractError";
  } catch (const ContractError& e) {
    EXPECT_NE(std::string(e.what()).find("conditional frequency undefined"), std::string::npos);
  }
  EXPECT_THROW(true_ece_analytic(ProbDistribution::uniform(), SyntheticModel::confidence_biased(-1.0)),
               ContractError);
}

TEST(TrueEcePropertyTest, BalanceTracksTrueEceWithSign) {
  for (const auto& d : {ProbDistribution(0.5, 0.5), ProbDistribution(1, 1), ProbDistribution(2, 2),
                        ProbDistribution(4, 4)}) {
    for (double t : {0.01, 0.05, 0.1, 0.11, 0.2, 0.5, 0.9}) {
      const double over = expected_score_quadrature(ScoringRule::kBalance, d,
                                                    SyntheticModel::confidence_biased(t));
      const double under = expected_score_quadrature(ScoringRule::kBalance, d,
                                                     SyntheticModel::confidence_biased(-t));
      EXPECT_NEAR(over, -true_ece_analytic(d, SyntheticModel::confidence_biased(t)), 1e-9);
      EXPECT_NEAR(under, true_ece_analytic(d, SyntheticModel::confidence_biased(-t)), 1e-9);
    }
  }
}

}  // namespace
}  // namespace calibkit
