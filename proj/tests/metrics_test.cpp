#include "calibkit/metrics.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "calibkit/errors.hpp"
#include "calibkit/expected_score.hpp"
#include "calibkit/synthetic.hpp"
#include "test_util.hpp"

namespace calibkit {
namespace {

PredictionSet make(std::initializer_list<std::pair<double, int>> items) {
  PredictionSet s;
  for (auto [p, y] : items) s.add(Prediction(p, y));
  return s;
}

const PredictionSet kHandSet = make({{0.15, 0}, {0.25, 1}, {0.85, 1}, {0.95, 1}});

TEST(PredictionTest, RejectsOutOfRangeAndNaN) {
  EXPECT_THROW(Prediction(-0.01, 1), ContractError);
  EXPECT_THROW(Prediction(1.01, 0), ContractError);
  EXPECT_THROW(Prediction(std::numeric_limits<double>::quiet_NaN(), 0), ContractError);
  EXPECT_THROW(Prediction(std::numeric_limits<double>::infinity(), 1), ContractError);
  EXPECT_THROW(Prediction(0.5, 2), ContractError);
  EXPECT_NO_THROW(Prediction(0.0, 0));
  EXPECT_NO_THROW(Prediction(1.0, 1));
}

TEST(PredictionTest, FromColumnsChecksLengths) {
  std::vector<double> p = {0.1, 0.2};
  std::vector<int> y = {1};
  EXPECT_THROW(PredictionSet::from_columns(p, y), ContractError);
}

TEST(MetricsTest, EmptySetIsRejected) {
  const PredictionSet empty;
  EXPECT_THROW(score_accuracy(empty), ContractError);
  EXPECT_THROW(score_brier(empty), ContractError);
  EXPECT_THROW(decompose_brier(empty), ContractError);
  EXPECT_THROW(score_balance(empty), ContractError);
  EXPECT_THROW(score_ece(empty, 10), ContractError);
  EXPECT_THROW(full_report(empty, 10), ContractError);
  try {
    score_accuracy(empty);
  } catch (const ContractError& e) {
    EXPECT_STREQ(e.what(), "empty prediction set");
  }
}

TEST(MetricsTest, Accuracy) {
  EXPECT_EQ(score_accuracy(make({{0.7, 1}})), 1.0);
  EXPECT_EQ(score_accuracy(make({{0.7, 0}})), 0.0);
  // 0.5 predicts a win.
  EXPECT_EQ(score_accuracy(make({{0.5, 1}})), 1.0);
  EXPECT_EQ(score_accuracy(make({{0.5, 0}})), 0.0);
}

TEST(MetricsTest, Brier) {
  EXPECT_EQ(score_brier(make({{1.0, 1}, {0.0, 0}})), 0.0);
  EXPECT_NEAR(score_brier(make({{0.7, 1}, {0.3, 0}})), 0.09, 1e-15);
}

TEST(MetricsTest, BrierDecomposition) {
  const auto d = decompose_brier(make({{0.7, 1}, {0.3, 0}}));
  EXPECT_NEAR(d.total, 0.09, 1e-15);
  EXPECT_NEAR(d.calibration_term, -0.12, 1e-15);
  EXPECT_NEAR(d.sharpness_term, 0.21, 1e-15);

  const auto certain = decompose_brier(make({{1.0, 1}}));
  EXPECT_EQ(certain.total, 0.0);
  EXPECT_EQ(certain.calibration_term, 0.0);
  EXPECT_EQ(certain.sharpness_term, 0.0);
}

TEST(MetricsTest, BrierCalibrationTermVanishesForOptimalModel) {
  const auto batch = generate_batch(ProbDistribution::uniform(), SyntheticModel::optimal(),
                                    100000, 11);
  EXPECT_LT(std::fabs(decompose_brier(batch.predictions).calibration_term), 0.005);
}

TEST(MetricsTest, BalanceBranches) {
  EXPECT_EQ(score_balance(make({{0.5, 1}})), 0.5);
  EXPECT_EQ(score_balance(make({{0.5, 0}})), -0.5);
  EXPECT_NEAR(score_balance(make({{0.7, 1}})), 0.3, 1e-15);
  EXPECT_NEAR(score_balance(make({{0.7, 0}})), -0.7, 1e-15);
  EXPECT_NEAR(score_balance(make({{0.3, 0}})), 0.3, 1e-15);
  EXPECT_NEAR(score_balance(make({{0.3, 1}})), -0.7, 1e-15);
}

TEST(MetricsTest, BinsHandExample) {
  const auto bins = compute_bins(kHandSet, 10);
  ASSERT_EQ(bins.size(), 10u);
  std::vector<double> gaps;
  std::size_t occupied = 0;
  std::size_t total = 0;
  for (const auto& b : bins) {
    total += b.count;
    if (!b.empty) {
      ++occupied;
      gaps.push_back(b.gap);
    }
  }
  EXPECT_EQ(total, 4u);
  ASSERT_EQ(occupied, 4u);
  EXPECT_EQ(bins[1].count, 1u);  // 0.15
  EXPECT_EQ(bins[2].count, 1u);  // 0.25
  EXPECT_EQ(bins[8].count, 1u);  // 0.85
  EXPECT_EQ(bins[9].count, 1u);  // 0.95
  EXPECT_NEAR(gaps[0], 0.15, 1e-15);
  EXPECT_NEAR(gaps[1], 0.75, 1e-15);
  EXPECT_NEAR(gaps[2], 0.15, 1e-15);
  EXPECT_NEAR(gaps[3], 0.05, 1e-15);
  EXPECT_TRUE(bins[0].empty);
  EXPECT_EQ(bins[0].mean_outcome, 0.0);
}

TEST(MetricsTest, BinEdges) {
  EXPECT_EQ(compute_bins(make({{1.0, 1}}), 10)[9].count, 1u);
  EXPECT_EQ(bin_of(0.0, 10), 0);
  EXPECT_EQ(bin_of(0.1, 10), 1);
  EXPECT_EQ(bin_of(0.3, 10), 3);
  EXPECT_EQ(bin_of(0.7, 10), 7);
  EXPECT_EQ(bin_of(std::nextafter(0.7, 0.0), 10), 6);
  EXPECT_EQ(bin_of(1.0, 10), 9);
  EXPECT_EQ(bin_of(1.0, 1), 0);
  // Every double lies inside the edges reported for its bin.
  SplitMix64 g(5);
  for (int i = 0; i < 20000; ++i) {
    const int m = 1 + static_cast<int>(g() % 100);
    const double p = (g() % 4 == 0) ? static_cast<double>(g() % (m + 1)) / m : uniform01(g);
    const int b = bin_of(p, m);
    const double lo = static_cast<double>(b) / m;
    const double hi = static_cast<double>(b + 1) / m;
    ASSERT_GE(p, lo);
    if (b + 1 < m) {
      ASSERT_LT(p, hi);
    } else {
      ASSERT_LE(p, 1.0);
    }
  }
}

TEST(MetricsTest, BinsRejectNonPositiveCount) {
  EXPECT_THROW(compute_bins(kHandSet, 0), ContractError);
  EXPECT_THROW(score_ece(kHandSet, -3), ContractError);
  EXPECT_THROW(score_mce(kHandSet, 0), ContractError);
}

TEST(MetricsTest, Ece) {
  EXPECT_NEAR(score_ece(kHandSet, 10), 0.275, 1e-15);
  EXPECT_EQ(score_ece(make({{1.0, 1}, {0.0, 0}}), 10), 0.0);
}

TEST(MetricsTest, EceOptimalBeta22) {
  const auto batch = generate_batch({2.0, 2.0}, SyntheticModel::optimal(), 100000, 4);
  EXPECT_LE(score_ece(batch.predictions, 10), 0.01);
}

TEST(MetricsTest, Mce) {
  EXPECT_NEAR(score_mce(kHandSet, 10), 0.75, 1e-15);
  EXPECT_EQ(score_mce(make({{1.0, 1}, {0.0, 0}}), 10), 0.0);
  const auto one = compute_bins(kHandSet, 1);
  EXPECT_EQ(score_mce(kHandSet, 1), one[0].gap);
}

TEST(MetricsTest, FullReport) {
  const auto r = full_report(make({{0.7, 1}, {0.3, 0}}), 10);
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_NEAR(r.brier, 0.09, 1e-15);
  EXPECT_NEAR(r.ece, 0.3, 1e-15);
  EXPECT_NEAR(r.balance, 0.3, 1e-15);
  EXPECT_EQ(r.ece_bins, 10);
  EXPECT_EQ(r.n, 2u);

  const auto c = full_report(make({{1.0, 1}}), 10);
  EXPECT_EQ(c.accuracy, 1.0);
  EXPECT_EQ(c.brier, 0.0);
  EXPECT_EQ(c.ece, 0.0);
  EXPECT_EQ(c.balance, 0.0);
}

TEST(MetricsTest, FullReportMatchesIndividualOps) {
  const auto batch = generate_batch(ProbDistribution::uniform(), SyntheticModel::optimal(),
                                    100000, 2023);
  const auto& p = batch.predictions;
  const auto r = full_report(p, 10);
  EXPECT_EQ(r.accuracy, score_accuracy(p));
  EXPECT_EQ(r.brier, score_brier(p));
  EXPECT_EQ(r.ece, score_ece(p, 10));
  EXPECT_EQ(r.balance, score_balance(p));
  const auto d = decompose_brier(p);
  EXPECT_EQ(r.brier_decomposition.calibration_term, d.calibration_term);
  EXPECT_EQ(r.brier_decomposition.sharpness_term, d.sharpness_term);
}

TEST(MetricsPropertyTest, PointwiseRanges) {
  SplitMix64 g(17);
  for (int i = 0; i < 100000; ++i) {
    const double p = i < 3 ? i * 0.5 : uniform01(g);
    for (int y : {0, 1}) {
      const double br = brier_point(p, y);
      const double ba = balance_point(p, y);
      ASSERT_GE(br, 0.0);
      ASSERT_LE(br, 1.0);
      ASSERT_GE(ba, -1.0);
      ASSERT_LE(ba, 0.5);
      const bool correct = (p >= 0.5) == (y == 1);
      if (correct) {
        ASSERT_GE(ba, 0.0);
      } else {
        ASSERT_LT(ba, 0.0);
      }
    }
  }
}

TEST(MetricsPropertyTest, DecompositionIdentity) {
  SplitMix64 g(101);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto set = testing::random_predictions(g, 500);
    const auto d = decompose_brier(set);
    const double sum = d.calibration_term + d.sharpness_term;
    ASSERT_LE(std::fabs(sum - d.total), 1e-12 * std::fabs(d.total)) << "trial " << trial;
    ASSERT_GE(d.sharpness_term, 0.0);
    ASSERT_LE(d.sharpness_term, 0.25);
  }
}

TEST(MetricsPropertyTest, SingleBinEceIsMeanGap) {
  SplitMix64 g(202);
  for (int trial = 0; trial < 500; ++trial) {
    const auto set = testing::random_predictions(g, 200);
    CompensatedSum y;
    CompensatedSum p;
    for (const auto& x : set) {
      y.add(x.outcome());
      p.add(x.p_hat());
    }
    const double n = static_cast<double>(set.size());
    ASSERT_NEAR(score_ece(set, 1), std::fabs(y.value() / n - p.value() / n), 1e-15);
  }
}

TEST(MetricsPropertyTest, EceBoundedByMce) {
  SplitMix64 g(303);
  for (int trial = 0; trial < 500; ++trial) {
    const auto set = testing::random_predictions(g, 300);
    const int m = 1 + static_cast<int>(g() % 50);
    const double ece = score_ece(set, m);
    const double mce = score_mce(set, m);
    ASSERT_GE(ece, 0.0);
    ASSERT_LE(ece, mce + 1e-15);
    ASSERT_LE(mce, 1.0);
  }
}

TEST(MetricsPropertyTest, InvariantToPermutationAndDuplication) {
  SplitMix64 g(404);
  for (int trial = 0; trial < 200; ++trial) {
    const auto set = testing::random_predictions(g, 300);
    auto items = set.items();
    for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[g() % i]);
    const PredictionSet shuffled(items);
    auto doubled_items = set.items();
    doubled_items.insert(doubled_items.end(), set.begin(), set.end());
    const PredictionSet doubled(doubled_items);

    const auto a = full_report(set, 10);
    for (const auto& other : {full_report(shuffled, 10), full_report(doubled, 10)}) {
      ASSERT_NEAR(a.accuracy, other.accuracy, 1e-14);
      ASSERT_NEAR(a.brier, other.brier, 1e-14);
      ASSERT_NEAR(a.ece, other.ece, 1e-14);
      ASSERT_NEAR(a.balance, other.balance, 1e-14);
      ASSERT_NEAR(a.brier_decomposition.calibration_term,
                  other.brier_decomposition.calibration_term, 1e-14);
    }
  }
}

TEST(MetricsPropertyTest, WeightedBalanceEqualsPointwiseExpectation) {
  // k*p wins and k*(1-p) losses at a fixed prediction q average to g(q; p).
  const int k = 1000;
  SplitMix64 g(505);
  for (int trial = 0; trial < 200; ++trial) {
    const int wins = static_cast<int>(g() % (k + 1));
    const double p = static_cast<double>(wins) / k;
    const double q = uniform01(g);
    PredictionSet set;
    for (int i = 0; i < k; ++i) set.add(Prediction(q, i < wins ? 1 : 0));
    ASSERT_NEAR(score_balance(set), pointwise_expected(ScoringRule::kBalance, q, p), 1e-15);
  }
}

}  // namespace
}  // namespace calibkit
