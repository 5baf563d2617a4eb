#include "calibkit/report.hpp"

#include <algorithm>

#include "calibkit/io.hpp"

namespace calibkit {

nlohmann::json to_json(const ReportDocument& doc) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : doc.rows) {
    rows.push_back({{"condition", r.condition},
                    {"report", to_json(r.report)},
                    {"source", r.source},
                    {"extras", r.extras}});
  }
  nlohmann::json series = nlohmann::json::array();
  for (const auto& s : doc.series) {
    series.push_back({{"name", s.name},
                      {"x_label", s.x_label},
                      {"y_label", s.y_label},
                      {"x", s.x},
                      {"y", s.y}});
  }
  nlohmann::json refs = nlohmann::json::array();
  for (const auto& r : doc.references) refs.push_back(to_json(r));
  nlohmann::json tables = nlohmann::json::array();
  for (const auto& t : doc.tables) {
    tables.push_back({{"name", t.name}, {"columns", t.columns}, {"rows", t.rows.size()}});
  }
  nlohmann::json prov = {{"seed", doc.provenance.seed},
                         {"version", doc.provenance.version},
                         {"config", to_json(doc.provenance.config)},
                         {"calls", doc.provenance.calls}};
  if (doc.provenance.timestamp) prov["timestamp"] = *doc.provenance.timestamp;
  return {{"experiment", doc.experiment}, {"rows", rows},       {"series", series},
          {"references", refs},           {"summary", doc.summary}, {"tables", tables},
          {"provenance", prov}};
}

std::string table_to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    out += (i ? "," : "") + t.columns[i];
  }
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
    out += "\n";
  }
  return out;
}

std::vector<std::filesystem::path> write_report(const ReportDocument& doc,
                                                const std::filesystem::path& dir) {
  std::string stem = doc.experiment;
  std::replace(stem.begin(), stem.end(), '-', '_');
  std::vector<std::filesystem::path> written;
  const auto json_path = dir / (stem + ".json");
  write_file(json_path, to_json(doc).dump(2) + "\n");
  written.push_back(json_path);
  for (const auto& t : doc.tables) {
    const auto p = dir / (t.name + ".csv");
    write_file(p, table_to_csv(t));
    written.push_back(p);
  }
  return written;
}

}  // namespace calibkit
