#pragma once

#include <cstddef>
#include <vector>

#include "calibkit/prediction.hpp"
#include "calibkit/scoring_rule.hpp"

namespace calibkit {

// One equal-width probability bin. Bin m (1-based) covers
// [(m-1)/M, m/M); the last bin is closed at 1.0. Empty bins keep zero means
// and are flagged instead of carrying NaN.
struct BinStats {
  int bin_index = 0;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
  bool empty = true;
  double mean_outcome = 0.0;
  double mean_p_hat = 0.0;
  double gap = 0.0;
};

// Brier score split into a calibration term, which vanishes in expectation
// for a calibrated model, and a sharpness term mean(p(1-p)).
struct BrierDecomposition {
  double total = 0.0;
  double calibration_term = 0.0;
  double sharpness_term = 0.0;
};

struct MetricReport {
  double accuracy = 0.0;
  double brier = 0.0;
  BrierDecomposition brier_decomposition;
  double ece = 0.0;
  int ece_bins = 0;
  double balance = 0.0;
  std::size_t n = 0;
};

// Mean of a pointwise rule over the set. Throws ContractError when empty.
double mean_score(ScoringRule rule, const PredictionSet& preds);

double score_accuracy(const PredictionSet& preds);
double score_brier(const PredictionSet& preds);
BrierDecomposition decompose_brier(const PredictionSet& preds);
double score_balance(const PredictionSet& preds);

// Assigns each prediction to one of m_bins equal-width bins. Throws
// ContractError when m_bins < 1 or the set is empty.
std::vector<BinStats> compute_bins(const PredictionSet& preds, int m_bins);

// Index (0-based) of the bin holding p_hat among m_bins equal-width bins.
int bin_of(double p_hat, int m_bins);

double score_ece(const PredictionSet& preds, int m_bins);
// Expected calibration error from precomputed bins.
double ece_from_bins(const std::vector<BinStats>& bins);
double score_mce(const PredictionSet& preds, int m_bins);

MetricReport full_report(const PredictionSet& preds, int m_bins);

}  // namespace calibkit
