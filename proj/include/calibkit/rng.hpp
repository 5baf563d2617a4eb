#pragma once

#include <cstdint>
#include <limits>

namespace calibkit {

// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// SplitMix64 generator, usable as a UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(SplitMix64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Independent random streams derived from one user seed. Every stream is a
// keyed counter: item i of stream s under seed k always draws from the same
// generator regardless of how the work is partitioned.
enum class Stream : std::uint64_t {
  kProbabilities = 1,
  kOutcomes = 2,
  kSplit = 3,
  kFeatureDirection = 4,
  kFeatureNoise = 5,
};

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return mix64(mix64(base) ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

constexpr std::uint64_t stream_seed(std::uint64_t seed, Stream stream) {
  return derive_seed(seed ^ 0xD1B54A32D192ED03ULL, static_cast<std::uint64_t>(stream));
}

// Generator dedicated to a single item of a stream.
inline SplitMix64 item_generator(std::uint64_t stream_key, std::uint64_t item) {
  return SplitMix64(derive_seed(stream_key, item));
}

}  // namespace calibkit
