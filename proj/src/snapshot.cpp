#include "calibkit/snapshot.hpp"

#include <algorithm>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "calibkit/distribution.hpp"
#include "calibkit/errors.hpp"
#include "calibkit/rng.hpp"
#include "calibkit/synthetic.hpp"

namespace calibkit {

const std::array<std::string, kSnapshotFeatures>& default_feature_names() {
  static const std::array<std::string, kSnapshotFeatures> names = {
      "gold_diff_top",    "gold_diff_jungle", "gold_diff_mid",    "gold_diff_bot",
      "gold_diff_support", "xp_diff_top",      "xp_diff_jungle",   "xp_diff_mid",
      "xp_diff_bot",      "xp_diff_support",  "dragons_blue",     "dragons_red",
      "towers_blue",      "towers_red"};
  return names;
}

SnapshotDataset::SnapshotDataset(std::vector<double> features, std::vector<int> outcomes,
                                 std::array<std::string, kSnapshotFeatures> feature_names,
                                 std::optional<std::vector<double>> true_p)
    : features_(std::move(features)),
      outcomes_(std::move(outcomes)),
      feature_names_(std::move(feature_names)),
      true_p_(std::move(true_p)) {
  if (features_.size() != outcomes_.size() * kSnapshotFeatures) {
    throw ContractError("expected " + std::to_string(kSnapshotFeatures) +
                        " features per row");
  }
  for (std::size_t i = 0; i < outcomes_.size(); ++i) {
    if (outcomes_[i] != 0 && outcomes_[i] != 1) {
      throw ContractError("row " + std::to_string(i + 1) + ": outcome must be 0 or 1");
    }
  }
  for (std::size_t k = 0; k < features_.size(); ++k) {
    if (!std::isfinite(features_[k])) {
      throw ContractError("row " + std::to_string(k / kSnapshotFeatures + 1) + ", column " +
                          feature_names_[k % kSnapshotFeatures] + ": non-finite feature");
    }
  }
  if (true_p_ && true_p_->size() != outcomes_.size()) {
    throw ContractError("true_p length does not match the number of rows");
  }
}

SnapshotDataset SnapshotDataset::subset(std::span<const std::size_t> indices) const {
  std::vector<double> f;
  std::vector<int> y;
  std::optional<std::vector<double>> tp;
  f.reserve(indices.size() * kSnapshotFeatures);
  y.reserve(indices.size());
  if (true_p_) tp.emplace().reserve(indices.size());
  for (std::size_t i : indices) {
    const auto r = row(i);
    f.insert(f.end(), r.begin(), r.end());
    y.push_back(outcomes_[i]);
    if (tp) tp->push_back((*true_p_)[i]);
  }
  return SnapshotDataset(std::move(f), std::move(y), feature_names_, std::move(tp));
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    auto field = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
      field.remove_suffix(1);
    }
    out.push_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string cell_context(std::size_t row, std::string_view column) {
  return "row " + std::to_string(row) + ", column '" + std::string(column) + "'";
}

}  // namespace

SnapshotDataset parse_dataset_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw ContractError("dataset is empty (missing header)");
  const auto header = split_fields(line);

  std::optional<std::size_t> outcome_col;
  std::optional<std::size_t> true_p_col;
  std::vector<std::size_t> feature_cols;
  std::array<std::string, kSnapshotFeatures> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "outcome") {
      outcome_col = c;
    } else if (header[c] == "true_p") {
      true_p_col = c;
    } else {
      feature_cols.push_back(c);
    }
  }
  if (!outcome_col) throw ContractError("header has no 'outcome' column");
  if (feature_cols.size() != kSnapshotFeatures) {
    throw ContractError("expected 14 features, header has " + std::to_string(feature_cols.size()));
  }
  for (std::size_t j = 0; j < kSnapshotFeatures; ++j) names[j] = header[feature_cols[j]];

  std::vector<double> features;
  std::vector<int> outcomes;
  std::optional<std::vector<double>> true_p;
  if (true_p_col) true_p.emplace();

  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    ++row;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw ContractError("row " + std::to_string(row) + ": expected " +
                          std::to_string(header.size()) + " fields, got " +
                          std::to_string(fields.size()));
    }
    for (std::size_t j = 0; j < kSnapshotFeatures; ++j) {
      const auto field = fields[feature_cols[j]];
      double v = 0.0;
      auto res = std::from_chars(field.data(), field.data() + field.size(), v);
      if (res.ec != std::errc() || res.ptr != field.data() + field.size() || !std::isfinite(v)) {
        throw ContractError(cell_context(row, names[j]) + ": invalid feature value '" +
                            std::string(field) + "'");
      }
      features.push_back(v);
    }
    const auto yf = fields[*outcome_col];
    if (yf != "0" && yf != "1") {
      throw ContractError(cell_context(row, "outcome") + ": outcome must be 0 or 1, got '" +
                          std::string(yf) + "'");
    }
    outcomes.push_back(yf == "1" ? 1 : 0);
    if (true_p_col) {
      const auto pf = fields[*true_p_col];
      double p = 0.0;
      auto res = std::from_chars(pf.data(), pf.data() + pf.size(), p);
      if (res.ec != std::errc() || res.ptr != pf.data() + pf.size() || !(p >= 0.0 && p <= 1.0)) {
        throw ContractError(cell_context(row, "true_p") + ": invalid probability '" +
                            std::string(pf) + "'");
      }
      true_p->push_back(p);
    }
  }
  return SnapshotDataset(std::move(features), std::move(outcomes), std::move(names),
                         std::move(true_p));
}

SnapshotDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ContractError("cannot open dataset '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset_csv(buf.str());
}

std::string dataset_to_csv(const SnapshotDataset& ds) {
  std::string out;
  for (const auto& name : ds.feature_names()) out += name + ",";
  out += "outcome";
  if (ds.true_p()) out += ",true_p";
  out += "\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (double v : ds.row(i)) out += format_double(v) + ",";
    out += ds.outcomes()[i] ? "1" : "0";
    if (ds.true_p()) out += "," + format_double((*ds.true_p())[i]);
    out += "\n";
  }
  return out;
}

std::pair<SnapshotDataset, SnapshotDataset> split(const SnapshotDataset& ds,
                                                  double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ContractError("train fraction must lie strictly between 0 and 1");
  }
  const std::size_t n = ds.size();
  if (n < 2) throw ContractError("split needs at least 2 rows");
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train == n) {
    throw ContractError("train fraction leaves an empty partition for n=" + std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 g(stream_seed(seed, Stream::kSplit));
  for (std::size_t i = n - 1; i > 0; --i) {
    boost::random::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(order[i], order[pick(g)]);
  }
  std::span<const std::size_t> all(order);
  return {ds.subset(all.first(n_train)), ds.subset(all.subspan(n_train))};
}

std::string to_string(TimeProfile profile) {
  switch (profile) {
    case TimeProfile::kEarly:
      return "early";
    case TimeProfile::kMid:
      return "mid";
    case TimeProfile::kLate:
      return "late";
  }
  return "unknown";
}

TimeProfile parse_time_profile(std::string_view name) {
  if (name == "early") return TimeProfile::kEarly;
  if (name == "mid") return TimeProfile::kMid;
  if (name == "late") return TimeProfile::kLate;
  throw ContractError("unknown time profile '" + std::string(name) +
                      "' (expected early, mid or late)");
}

namespace {

// Latent coordinate j maps to offset + scale * z_j.
constexpr std::array<double, kSnapshotFeatures> kScale = {
    1500, 1500, 1500, 1500, 900, 800, 800, 800, 800, 500, 0.7, 0.7, 0.9, 0.9};
constexpr std::array<double, kSnapshotFeatures> kOffset = {0, 0, 0, 0, 0, 0, 0,
                                                           0, 0, 0, 1.2, 1.2, 1.5, 1.5};
constexpr double kNoiseScale = 1.0;
// Keeps logit(p) finite for Beta(0.5, 0.5) draws at the ends of [0, 1].
constexpr double kProbabilityFloor = 1e-12;

std::array<double, kSnapshotFeatures> score_direction(std::uint64_t seed) {
  const std::uint64_t key = stream_seed(seed, Stream::kFeatureDirection);
  std::array<double, kSnapshotFeatures> u{};
  double norm2 = 0.0;
  for (std::size_t j = 0; j < kSnapshotFeatures; ++j) {
    SplitMix64 g = item_generator(key, j);
    boost::random::normal_distribution<double> normal;
    u[j] = normal(g);
    norm2 += u[j] * u[j];
  }
  const double norm = std::sqrt(norm2);
  for (double& v : u) v /= norm;
  return u;
}

ProbDistribution profile_distribution(TimeProfile profile) {
  switch (profile) {
    case TimeProfile::kEarly:
      return {2.0, 2.0};
    case TimeProfile::kMid:
      return {1.0, 1.0};
    case TimeProfile::kLate:
      return {0.5, 0.5};
  }
  return ProbDistribution::uniform();
}

}  // namespace

GeneratorTruth generator_truth(std::uint64_t seed) {
  const auto u = score_direction(seed);
  GeneratorTruth t;
  for (std::size_t j = 0; j < kSnapshotFeatures; ++j) {
    t.weights[j] = u[j] / kScale[j];
    t.bias -= u[j] * kOffset[j] / kScale[j];
  }
  return t;
}

SnapshotDataset generate_snapshots(std::size_t n, TimeProfile profile, std::uint64_t seed) {
  if (n == 0) throw ContractError("snapshot count must be >= 1");
  // Same p and y streams as generate_batch, so the snapshot truth matches an
  // optimal-model batch drawn with this seed.
  ScoredBatch batch = generate_batch(profile_distribution(profile), SyntheticModel::optimal(), n, seed);
  const auto u = score_direction(seed);
  const std::uint64_t noise_key = stream_seed(seed, Stream::kFeatureNoise);

  std::vector<double> features(n * kSnapshotFeatures);
  std::vector<int> outcomes(n);
  std::vector<double> true_p(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = std::clamp(batch.true_p[i], kProbabilityFloor, 1.0 - kProbabilityFloor);
    const double score = std::log(p) - std::log1p(-p);

    SplitMix64 g = item_generator(noise_key, i);
    boost::random::normal_distribution<double> normal(0.0, kNoiseScale);
    std::array<double, kSnapshotFeatures> noise{};
    double along = 0.0;
    for (std::size_t j = 0; j < kSnapshotFeatures; ++j) {
      noise[j] = normal(g);
      along += noise[j] * u[j];
    }
    for (std::size_t j = 0; j < kSnapshotFeatures; ++j) {
      const double latent = score * u[j] + (noise[j] - along * u[j]);
      features[i * kSnapshotFeatures + j] = kOffset[j] + kScale[j] * latent;
    }
    outcomes[i] = batch.predictions[i].outcome();
    true_p[i] = p;
  }
  return SnapshotDataset(std::move(features), std::move(outcomes), default_feature_names(),
                         std::move(true_p));
}

}  // namespace calibkit
