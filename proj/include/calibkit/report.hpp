#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "calibkit/config.hpp"
#include "calibkit/expected_score.hpp"
#include "calibkit/metrics.hpp"

namespace calibkit {

struct ReportRow {
  std::string condition;
  MetricReport report;
  std::string source;  // the operation call that produced the report
  std::map<std::string, double> extras;
};

// Plot-ready x/y series.
struct Series {
  std::string name;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<double> y;
};

// Flat table written as `<name>.csv`. Column order is fixed per experiment.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct Provenance {
  std::uint64_t seed = 0;
  std::string version;
  ExperimentConfig config;
  std::vector<std::string> calls;
  std::optional<std::string> timestamp;  // only when explicitly requested
};

struct ReportDocument {
  std::string experiment;
  std::vector<ReportRow> rows;
  std::vector<Series> series;
  std::vector<ExpectedScoreRecord> references;
  std::map<std::string, double> summary;
  std::vector<Table> tables;
  Provenance provenance;
};

nlohmann::json to_json(const ReportDocument& doc);
std::string table_to_csv(const Table& t);

// Writes `<experiment>.json` (dashes become underscores) and one CSV file per
// table. Returns the written paths in order.
std::vector<std::filesystem::path> write_report(const ReportDocument& doc,
                                                const std::filesystem::path& dir);

}  // namespace calibkit
