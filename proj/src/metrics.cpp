#include "calibkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "calibkit/errors.hpp"
#include "calibkit/summation.hpp"

namespace calibkit {

namespace {

void require_nonempty(const PredictionSet& preds) {
  if (preds.empty()) throw ContractError("empty prediction set");
}

void require_bins(int m_bins) {
  if (m_bins < 1) {
    throw ContractError("number of bins must be >= 1, got " + std::to_string(m_bins));
  }
}

}  // namespace

std::string to_string(ScoringRule rule) {
  switch (rule) {
    case ScoringRule::kAccuracy:
      return "accuracy";
    case ScoringRule::kBrier:
      return "brier";
    case ScoringRule::kBalance:
      return "balance";
  }
  return "unknown";
}

ScoringRule parse_scoring_rule(std::string_view name) {
  if (name == "accuracy") return ScoringRule::kAccuracy;
  if (name == "brier") return ScoringRule::kBrier;
  if (name == "balance") return ScoringRule::kBalance;
  throw ContractError("unknown scoring rule '" + std::string(name) +
                      "' (expected accuracy, brier or balance)");
}

double mean_score(ScoringRule rule, const PredictionSet& preds) {
  require_nonempty(preds);
  CompensatedSum sum;
  for (const auto& p : preds) sum.add(score_point(rule, p.p_hat(), p.outcome()));
  return sum.value() / static_cast<double>(preds.size());
}

double score_accuracy(const PredictionSet& preds) {
  return mean_score(ScoringRule::kAccuracy, preds);
}

double score_brier(const PredictionSet& preds) { return mean_score(ScoringRule::kBrier, preds); }

double score_balance(const PredictionSet& preds) {
  return mean_score(ScoringRule::kBalance, preds);
}

BrierDecomposition decompose_brier(const PredictionSet& preds) {
  require_nonempty(preds);
  CompensatedSum calibration;
  CompensatedSum sharpness;
  for (const auto& p : preds) {
    const double q = p.p_hat();
    calibration.add((q - p.outcome()) * (2.0 * q - 1.0));
    sharpness.add(q * (1.0 - q));
  }
  const double n = static_cast<double>(preds.size());
  BrierDecomposition d;
  d.total = score_brier(preds);
  d.calibration_term = calibration.value() / n;
  d.sharpness_term = sharpness.value() / n;
  return d;
}

int bin_of(double p_hat, int m_bins) {
  const double m = static_cast<double>(m_bins);
  int idx = static_cast<int>(std::floor(p_hat * m));
  idx = std::clamp(idx, 0, m_bins - 1);
  // Product rounding can land one bin off near an edge; settle against the
  // edges exactly as reported in BinStats.
  if (idx > 0 && p_hat < static_cast<double>(idx) / m) --idx;
  if (idx + 1 < m_bins && p_hat >= static_cast<double>(idx + 1) / m) ++idx;
  return idx;
}

std::vector<BinStats> compute_bins(const PredictionSet& preds, int m_bins) {
  require_bins(m_bins);
  require_nonempty(preds);

  struct Acc {
    std::size_t count = 0;
    CompensatedSum outcomes;
    CompensatedSum p_hats;
  };
  std::vector<Acc> acc(static_cast<std::size_t>(m_bins));
  for (const auto& p : preds) {
    auto& a = acc[static_cast<std::size_t>(bin_of(p.p_hat(), m_bins))];
    ++a.count;
    a.outcomes.add(p.outcome());
    a.p_hats.add(p.p_hat());
  }

  std::vector<BinStats> bins(acc.size());
  const double m = static_cast<double>(m_bins);
  for (int i = 0; i < m_bins; ++i) {
    auto& b = bins[static_cast<std::size_t>(i)];
    const auto& a = acc[static_cast<std::size_t>(i)];
    b.bin_index = i + 1;
    b.lower = static_cast<double>(i) / m;
    b.upper = static_cast<double>(i + 1) / m;
    b.count = a.count;
    b.empty = a.count == 0;
    if (!b.empty) {
      const double c = static_cast<double>(a.count);
      b.mean_outcome = a.outcomes.value() / c;
      b.mean_p_hat = a.p_hats.value() / c;
      b.gap = std::fabs(b.mean_outcome - b.mean_p_hat);
    }
  }
  return bins;
}

double ece_from_bins(const std::vector<BinStats>& bins) {
  std::size_t n = 0;
  for (const auto& b : bins) n += b.count;
  if (n == 0) throw ContractError("empty prediction set");
  CompensatedSum sum;
  for (const auto& b : bins) {
    if (!b.empty) sum.add(static_cast<double>(b.count) * b.gap);
  }
  return sum.value() / static_cast<double>(n);
}

double score_ece(const PredictionSet& preds, int m_bins) {
  return ece_from_bins(compute_bins(preds, m_bins));
}

double score_mce(const PredictionSet& preds, int m_bins) {
  double worst = 0.0;
  for (const auto& b : compute_bins(preds, m_bins)) {
    if (!b.empty) worst = std::max(worst, b.gap);
  }
  return worst;
}

MetricReport full_report(const PredictionSet& preds, int m_bins) {
  require_bins(m_bins);
  MetricReport r;
  r.accuracy = score_accuracy(preds);
  r.brier_decomposition = decompose_brier(preds);
  r.brier = r.brier_decomposition.total;
  r.ece = score_ece(preds, m_bins);
  r.ece_bins = m_bins;
  r.balance = score_balance(preds);
  r.n = preds.size();
  return r;
}

}  // namespace calibkit
