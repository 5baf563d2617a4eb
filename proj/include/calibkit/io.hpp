#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "calibkit/expected_score.hpp"
#include "calibkit/metrics.hpp"
#include "calibkit/synthetic.hpp"

namespace calibkit {

// CSV with header `p_hat,outcome`. Throws ContractError naming the data row
// (1-based) of the first bad record.
PredictionSet parse_predictions_csv(std::string_view text);
// JSON array of {"p_hat": <real>, "outcome": <0|1>}.
PredictionSet parse_predictions_json(std::string_view text);
// Picks the parser from the extension (.json, anything else is CSV).
PredictionSet load_predictions(const std::filesystem::path& path);

nlohmann::json to_json(const BrierDecomposition& d);
nlohmann::json to_json(const MetricReport& r);
// Empty bins carry null means and gap.
nlohmann::json to_json(const BinStats& b);
nlohmann::json to_json(const ExpectedScoreRecord& r);
// Columns true_p,p_hat,outcome; true_p is the hidden ground truth.
nlohmann::json to_json(const ScoredBatch& b);

// Header plus one row; columns are fixed:
// n,accuracy,brier,brier_calibration,brier_sharpness,ece,ece_bins,balance
std::string report_to_csv(const MetricReport& r);
// One bin per row: bin,lower,upper,count,empty,mean_outcome,mean_p_hat,gap
std::string bins_to_csv(const std::vector<BinStats>& bins);
std::string batch_to_csv(const ScoredBatch& b);
std::string predictions_to_csv(const PredictionSet& preds);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace calibkit
