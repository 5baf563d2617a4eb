#include "calibkit/config.hpp"

#include <charconv>
#include <map>
#include <sstream>

#include "calibkit/errors.hpp"

namespace calibkit {

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  const auto& ta = a.training;
  const auto& tb = b.training;
  return a.experiment == b.experiment && a.distributions == b.distributions &&
         a.tendencies == b.tendencies && a.n == b.n && a.replicates == b.replicates &&
         a.bins == b.bins && a.bins_min == b.bins_min && a.bins_max == b.bins_max &&
         a.sizes == b.sizes && a.seed == b.seed && a.output == b.output &&
         a.profile == b.profile && a.train_fraction == b.train_fraction &&
         a.train_file == b.train_file && a.test_file == b.test_file &&
         a.histogram_bins == b.histogram_bins && ta.learning_rate == tb.learning_rate &&
         ta.max_iters == tb.max_iters && ta.tolerance == tb.tolerance && ta.l2 == tb.l2 &&
         ta.seed == tb.seed;
}

ExperimentConfig default_config(std::string_view experiment) {
  ExperimentConfig cfg;
  cfg.experiment = std::string(experiment);
  if (experiment == "case1") {
    cfg.distributions = {{0.5, 0.5}, {1.0, 1.0}, {2.0, 2.0}};
    cfg.n = 100000;
  } else if (experiment == "sweep-bins") {
    cfg.distributions = {ProbDistribution::uniform()};
    cfg.tendencies = {0.1, 0.11};
    cfg.n = 10000;
    cfg.replicates = 20;
  } else if (experiment == "sweep-datasize") {
    cfg.distributions = {ProbDistribution::uniform()};
    cfg.tendencies = {0.1};
    cfg.replicates = 100;
    for (std::size_t s = 50; s <= 1000; s += 50) cfg.sizes.push_back(s);
  } else if (experiment == "train-eval") {
    cfg.n = 100000;
    cfg.profile = "mid";
  } else {
    throw ContractError("unknown experiment '" + std::string(experiment) + "'");
  }
  cfg.training.seed = cfg.seed;
  return cfg;
}

void validate(const ExperimentConfig& cfg) {
  auto fail = [](const std::string& msg) { throw ContractError("invalid config: " + msg); };
  if (cfg.n == 0) fail("n must be positive");
  if (cfg.replicates == 0) fail("replicates must be positive");
  if (cfg.bins < 1) fail("bins must be >= 1");
  if (cfg.histogram_bins < 1) fail("histogram_bins must be >= 1");
  if (cfg.experiment == "case1") {
    if (cfg.distributions.empty()) fail("case1 needs at least one distribution");
    if (cfg.n < 2) fail("case1 needs n >= 2 for standard errors");
  } else if (cfg.experiment == "sweep-bins") {
    if (cfg.distributions.empty()) fail("sweep-bins needs a distribution");
    if (cfg.tendencies.empty()) fail("sweep-bins needs at least one tendency");
    if (cfg.bins_min < 1 || cfg.bins_max < cfg.bins_min) fail("bin range is empty");
  } else if (cfg.experiment == "sweep-datasize") {
    if (cfg.distributions.empty()) fail("sweep-datasize needs a distribution");
    if (cfg.tendencies.empty()) fail("sweep-datasize needs a tendency");
    if (cfg.sizes.empty()) fail("sweep-datasize needs at least one size");
    for (auto s : cfg.sizes) {
      if (s == 0) fail("sizes must be positive");
    }
  } else if (cfg.experiment == "train-eval") {
    parse_time_profile(cfg.profile);
    if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) {
      fail("train_fraction must lie in (0, 1)");
    }
  } else {
    fail("unknown experiment '" + cfg.experiment + "'");
  }
  for (double t : cfg.tendencies) {
    if (!(t >= -1.0 && t <= 1.0)) fail("tendencies must lie in [-1, 1]");
  }
}

namespace {

template <typename T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += " ";
    if constexpr (std::is_same_v<T, double>) {
      out += format_double(xs[i]);
    } else if constexpr (std::is_same_v<T, ProbDistribution>) {
      out += xs[i].name();
    } else {
      out += std::to_string(xs[i]);
    }
  }
  return out;
}

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

template <typename T>
T parse_scalar(const std::string& key, std::string_view v) {
  T out{};
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ContractError("config key '" + key + "': cannot parse '" + std::string(v) + "'");
  }
  return out;
}

}  // namespace

std::string config_to_text(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "experiment = " << c.experiment << "\n"
      << "distributions = " << join(c.distributions) << "\n"
      << "tendencies = " << join(c.tendencies) << "\n"
      << "n = " << c.n << "\n"
      << "replicates = " << c.replicates << "\n"
      << "bins = " << c.bins << "\n"
      << "bins_min = " << c.bins_min << "\n"
      << "bins_max = " << c.bins_max << "\n"
      << "sizes = " << join(c.sizes) << "\n"
      << "seed = " << c.seed << "\n"
      << "output = " << c.output << "\n"
      << "profile = " << c.profile << "\n"
      << "train_fraction = " << format_double(c.train_fraction) << "\n"
      << "train_file = " << c.train_file << "\n"
      << "test_file = " << c.test_file << "\n"
      << "histogram_bins = " << c.histogram_bins << "\n"
      << "learning_rate = " << format_double(c.training.learning_rate) << "\n"
      << "max_iters = " << c.training.max_iters << "\n"
      << "tolerance = " << format_double(c.training.tolerance) << "\n"
      << "l2 = " << format_double(c.training.l2) << "\n";
  return out.str();
}

ExperimentConfig parse_config_text(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ContractError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    auto key = line.substr(0, eq);
    auto value = line.substr(eq + 1);
    auto strip = [](std::string& s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    strip(key);
    strip(value);
    kv[key] = value;
  }

  ExperimentConfig c = default_config(kv.count("experiment") ? kv["experiment"] : "case1");
  for (const auto& [key, v] : kv) {
    if (key == "experiment") {
      continue;
    } else if (key == "distributions") {
      c.distributions.clear();
      for (const auto& w : words(v)) c.distributions.push_back(parse_distribution(w));
    } else if (key == "tendencies") {
      c.tendencies.clear();
      for (const auto& w : words(v)) c.tendencies.push_back(parse_scalar<double>(key, w));
    } else if (key == "sizes") {
      c.sizes.clear();
      for (const auto& w : words(v)) c.sizes.push_back(parse_scalar<std::size_t>(key, w));
    } else if (key == "n") {
      c.n = parse_scalar<std::size_t>(key, v);
    } else if (key == "replicates") {
      c.replicates = parse_scalar<std::size_t>(key, v);
    } else if (key == "bins") {
      c.bins = parse_scalar<int>(key, v);
    } else if (key == "bins_min") {
      c.bins_min = parse_scalar<int>(key, v);
    } else if (key == "bins_max") {
      c.bins_max = parse_scalar<int>(key, v);
    } else if (key == "seed") {
      c.seed = parse_scalar<std::uint64_t>(key, v);
    } else if (key == "output") {
      c.output = v;
    } else if (key == "profile") {
      c.profile = v;
    } else if (key == "train_fraction") {
      c.train_fraction = parse_scalar<double>(key, v);
    } else if (key == "train_file") {
      c.train_file = v;
    } else if (key == "test_file") {
      c.test_file = v;
    } else if (key == "histogram_bins") {
      c.histogram_bins = parse_scalar<int>(key, v);
    } else if (key == "learning_rate") {
      c.training.learning_rate = parse_scalar<double>(key, v);
    } else if (key == "max_iters") {
      c.training.max_iters = parse_scalar<std::size_t>(key, v);
    } else if (key == "tolerance") {
      c.training.tolerance = parse_scalar<double>(key, v);
    } else if (key == "l2") {
      c.training.l2 = parse_scalar<double>(key, v);
    } else {
      throw ContractError("unknown config key '" + key + "'");
    }
  }
  c.training.seed = c.seed;
  return c;
}

nlohmann::json to_json(const ExperimentConfig& c) {
  std::vector<std::string> dists;
  for (const auto& d : c.distributions) dists.push_back(d.name());
  return {{"experiment", c.experiment},
          {"distributions", dists},
          {"tendencies", c.tendencies},
          {"n", c.n},
          {"replicates", c.replicates},
          {"bins", c.bins},
          {"bins_min", c.bins_min},
          {"bins_max", c.bins_max},
          {"sizes", c.sizes},
          {"seed", c.seed},
          {"output", c.output},
          {"profile", c.profile},
          {"train_fraction", c.train_fraction},
          {"train_file", c.train_file},
          {"test_file", c.test_file},
          {"histogram_bins", c.histogram_bins},
          {"training",
           {{"learning_rate", c.training.learning_rate},
            {"max_iters", c.training.max_iters},
            {"tolerance", c.training.tolerance},
            {"l2", c.training.l2}}}};
}

}  // namespace calibkit
