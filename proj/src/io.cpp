#include "calibkit/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "calibkit/errors.hpp"

namespace calibkit {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string row_error(std::size_t row, const std::string& what) {
  return "row " + std::to_string(row) + ": " + what;
}

}  // namespace

PredictionSet parse_predictions_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw ContractError("prediction file is empty");
  {
    const auto header = trim(line);
    if (header != "p_hat,outcome" && header != "p_hat, outcome") {
      throw ContractError("expected CSV header 'p_hat,outcome', got '" + std::string(header) + "'");
    }
  }
  PredictionSet set;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const std::string_view sv(line);
    const auto comma = sv.find(',');
    if (comma == std::string_view::npos || sv.find(',', comma + 1) != std::string_view::npos) {
      throw ContractError(row_error(row, "expected 2 fields 'p_hat,outcome'"));
    }
    const auto pf = trim(sv.substr(0, comma));
    const auto yf = trim(sv.substr(comma + 1));
    double p = 0.0;
    auto res = std::from_chars(pf.data(), pf.data() + pf.size(), p);
    if (res.ec != std::errc() || res.ptr != pf.data() + pf.size()) {
      throw ContractError(row_error(row, "cannot parse p_hat '" + std::string(pf) + "'"));
    }
    if (yf != "0" && yf != "1") {
      throw ContractError(row_error(row, "outcome must be 0 or 1, got '" + std::string(yf) + "'"));
    }
    try {
      set.add(Prediction(p, yf == "1" ? 1 : 0));
    } catch (const ContractError& e) {
      throw ContractError(row_error(row, e.what()));
    }
  }
  return set;
}

PredictionSet parse_predictions_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ContractError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw ContractError("expected a JSON array of predictions");
  PredictionSet set;
  set.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& item = doc[i];
    const std::size_t row = i + 1;
    if (!item.is_object() || !item.contains("p_hat") || !item.contains("outcome")) {
      throw ContractError(row_error(row, "expected {\"p_hat\": <real>, \"outcome\": <0|1>}"));
    }
    const auto& p = item["p_hat"];
    const auto& y = item["outcome"];
    if (!p.is_number()) throw ContractError(row_error(row, "p_hat must be a number"));
    if (!y.is_number_integer()) throw ContractError(row_error(row, "outcome must be 0 or 1"));
    try {
      set.add(Prediction(p.get<double>(), y.get<int>()));
    } catch (const ContractError& e) {
      throw ContractError(row_error(row, e.what()));
    }
  }
  return set;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ContractError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ContractError("cannot write '" + path.string() + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
}

PredictionSet load_predictions(const std::filesystem::path& path) {
  const auto text = read_file(path);
  if (path.extension() == ".json") return parse_predictions_json(text);
  return parse_predictions_csv(text);
}

nlohmann::json to_json(const BrierDecomposition& d) {
  return {{"total", d.total},
          {"calibration_term", d.calibration_term},
          {"sharpness_term", d.sharpness_term}};
}

nlohmann::json to_json(const MetricReport& r) {
  return {{"n", r.n},
          {"accuracy", r.accuracy},
          {"brier", r.brier},
          {"brier_decomposition", to_json(r.brier_decomposition)},
          {"ece", r.ece},
          {"ece_bins", r.ece_bins},
          {"balance", r.balance}};
}

nlohmann::json to_json(const BinStats& b) {
  nlohmann::json j = {{"bin", b.bin_index}, {"lower", b.lower}, {"upper", b.upper},
                      {"count", b.count},   {"empty", b.empty}};
  if (b.empty) {
    j["mean_outcome"] = nullptr;
    j["mean_p_hat"] = nullptr;
    j["gap"] = nullptr;
  } else {
    j["mean_outcome"] = b.mean_outcome;
    j["mean_p_hat"] = b.mean_p_hat;
    j["gap"] = b.gap;
  }
  return j;
}

nlohmann::json to_json(const ExpectedScoreRecord& r) {
  nlohmann::json j = {{"rule", r.rule},     {"distribution", r.distribution},
                      {"model", r.model},   {"method", r.method},
                      {"value", r.value}};
  if (r.std_error) j["std_error"] = *r.std_error;
  return j;
}

nlohmann::json to_json(const ScoredBatch& b) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < b.true_p.size(); ++i) {
    rows.push_back({{"true_p", b.true_p[i]},
                    {"p_hat", b.predictions[i].p_hat()},
                    {"outcome", b.predictions[i].outcome()}});
  }
  return {{"seed", b.seed}, {"hidden_truth_column", "true_p"}, {"rows", std::move(rows)}};
}

std::string report_to_csv(const MetricReport& r) {
  std::string out = "n,accuracy,brier,brier_calibration,brier_sharpness,ece,ece_bins,balance\n";
  out += std::to_string(r.n) + "," + format_double(r.accuracy) + "," + format_double(r.brier) +
         "," + format_double(r.brier_decomposition.calibration_term) + "," +
         format_double(r.brier_decomposition.sharpness_term) + "," + format_double(r.ece) + "," +
         std::to_string(r.ece_bins) + "," + format_double(r.balance) + "\n";
  return out;
}

std::string bins_to_csv(const std::vector<BinStats>& bins) {
  std::string out = "bin,lower,upper,count,empty,mean_outcome,mean_p_hat,gap\n";
  for (const auto& b : bins) {
    out += std::to_string(b.bin_index) + "," + format_double(b.lower) + "," +
           format_double(b.upper) + "," + std::to_string(b.count) + "," +
           (b.empty ? "1" : "0") + ",";
    if (!b.empty) {
      out += format_double(b.mean_outcome) + "," + format_double(b.mean_p_hat) + "," +
             format_double(b.gap);
    } else {
      out += ",,";
    }
    out += "\n";
  }
  return out;
}

std::string batch_to_csv(const ScoredBatch& b) {
  std::string out = "true_p,p_hat,outcome\n";
  for (std::size_t i = 0; i < b.true_p.size(); ++i) {
    out += format_double(b.true_p[i]) + "," + format_double(b.predictions[i].p_hat()) + "," +
           (b.predictions[i].outcome() ? "1" : "0") + "\n";
  }
  return out;
}

std::string predictions_to_csv(const PredictionSet& preds) {
  std::string out = "p_hat,outcome\n";
  for (const auto& p : preds) {
    out += format_double(p.p_hat()) + "," + (p.outcome() ? "1" : "0") + "\n";
  }
  return out;
}

}  // namespace calibkit
