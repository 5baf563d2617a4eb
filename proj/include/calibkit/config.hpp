#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "calibkit/distribution.hpp"
#include "calibkit/logistic.hpp"

namespace calibkit {

inline constexpr std::uint64_t kDefaultSeed = 2023;

// Parameters of one harness run. Fields an experiment does not use are kept
// at their defaults and still round-trip through the file format.
struct ExperimentConfig {
  std::string experiment = "case1";  // case1 | sweep-bins | sweep-datasize | train-eval
  std::vector<ProbDistribution> distributions;
  std::vector<double> tendencies;
  std::size_t n = 100000;
  std::size_t replicates = 1;
  int bins = 10;
  int bins_min = 5;
  int bins_max = 100;
  std::vector<std::size_t> sizes;
  std::uint64_t seed = kDefaultSeed;
  std::string output;
  std::string profile = "mid";
  double train_fraction = 0.6;
  std::string train_file;
  std::string test_file;
  int histogram_bins = 50;
  TrainConfig training;

  friend bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);
};

// Defaults for a named experiment. Throws ContractError for unknown names.
ExperimentConfig default_config(std::string_view experiment);

// Throws ContractError when a count is zero, a range is empty or a value is
// out of its domain.
void validate(const ExperimentConfig& cfg);

// Key-value text: one `key = value` per line, `#` starts a comment, list
// values are separated by whitespace. Keys missing from the text keep the
// experiment's defaults.
std::string config_to_text(const ExperimentConfig& cfg);
ExperimentConfig parse_config_text(std::string_view text);

nlohmann::json to_json(const ExperimentConfig& cfg);

}  // namespace calibkit
