#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace calibkit {

inline constexpr std::size_t kSnapshotFeatures = 14;

// Per-role gold and experience differences, dragons and towers per team.
const std::array<std::string, kSnapshotFeatures>& default_feature_names();

// Game-state snapshots with binary match outcomes. Features are stored
// row-major, kSnapshotFeatures per row.
class SnapshotDataset {
 public:
  SnapshotDataset() = default;
  // Throws ContractError on a length mismatch, a non-0/1 label or a
  // non-finite feature.
  SnapshotDataset(std::vector<double> features, std::vector<int> outcomes,
                  std::array<std::string, kSnapshotFeatures> feature_names,
                  std::optional<std::vector<double>> true_p = std::nullopt);

  std::size_t size() const { return outcomes_.size(); }
  std::span<const double, kSnapshotFeatures> row(std::size_t i) const {
    return std::span<const double, kSnapshotFeatures>(features_.data() + i * kSnapshotFeatures,
                                                      kSnapshotFeatures);
  }
  const std::vector<double>& features() const { return features_; }
  const std::vector<int>& outcomes() const { return outcomes_; }
  const std::array<std::string, kSnapshotFeatures>& feature_names() const {
    return feature_names_;
  }
  const std::optional<std::vector<double>>& true_p() const { return true_p_; }

  // Rows in the given order.
  SnapshotDataset subset(std::span<const std::size_t> indices) const;

 private:
  std::vector<double> features_;
  std::vector<int> outcomes_;
  std::array<std::string, kSnapshotFeatures> feature_names_;
  std::optional<std::vector<double>> true_p_;
};

// CSV with a header naming 14 feature columns, `outcome` and optionally
// `true_p`. Row numbers in error messages count data rows from 1.
SnapshotDataset load_dataset(const std::filesystem::path& path);
SnapshotDataset parse_dataset_csv(std::string_view text);
std::string dataset_to_csv(const SnapshotDataset& ds);

// Seeded shuffle, then the first round(n * train_fraction) rows train.
std::pair<SnapshotDataset, SnapshotDataset> split(const SnapshotDataset& ds,
                                                  double train_fraction, std::uint64_t seed);

enum class TimeProfile { kEarly, kMid, kLate };

std::string to_string(TimeProfile profile);
TimeProfile parse_time_profile(std::string_view name);

// Synthetic snapshots whose ground-truth win probability follows
// Beta(2,2) / Beta(1,1) / Beta(0.5,0.5) for early / mid / late games.
// The logit of p lies along a fixed unit direction of the latent feature
// space; isotropic noise fills the orthogonal complement, and each latent
// coordinate is then mapped to a game-like scale. The direction depends on
// the seed only, so generator_truth(seed) recovers the exact score.
SnapshotDataset generate_snapshots(std::size_t n, TimeProfile profile, std::uint64_t seed);

// The generator's exact linear score: logit(true_p) = weights . x + bias.
struct GeneratorTruth {
  std::array<double, kSnapshotFeatures> weights{};
  double bias = 0.0;
};
GeneratorTruth generator_truth(std::uint64_t seed);

}  // namespace calibkit
