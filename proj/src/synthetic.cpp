#include "calibkit/synthetic.hpp"

#include <boost/random/beta_distribution.hpp>
#include <charconv>
#include <cmath>
#include <string>

#include "calibkit/errors.hpp"
#include "calibkit/parallel.hpp"
#include "calibkit/rng.hpp"

namespace calibkit {

SyntheticModel SyntheticModel::confidence_biased(double tendency) {
  if (!std::isfinite(tendency) || tendency < -1.0 || tendency > 1.0) {
    throw ContractError("tendency must lie in [-1, 1], got " + format_double(tendency));
  }
  return SyntheticModel(tendency);
}

std::string SyntheticModel::name() const {
  if (is_optimal()) return "optimal";
  return "tendency(" + format_double(tendency_) + ")";
}

SyntheticModel parse_model(std::string_view text) {
  if (text == "optimal") return SyntheticModel::optimal();
  std::string_view body = text;
  if (body.starts_with("tendency(") && body.ends_with(")")) {
    body = body.substr(9, body.size() - 10);
  } else if (body.starts_with("tendency:")) {
    body = body.substr(9);
  }
  double t = 0.0;
  auto res = std::from_chars(body.data(), body.data() + body.size(), t);
  if (res.ec != std::errc() || res.ptr != body.data() + body.size()) {
    throw ContractError("cannot parse model '" + std::string(text) +
                        "' (expected optimal, tendency(t) or a number)");
  }
  return SyntheticModel::confidence_biased(t);
}

std::vector<double> sample_probs(const ProbDistribution& dist, std::size_t n,
                                 std::uint64_t seed) {
  if (n == 0) throw ContractError("sample size must be >= 1");
  const std::uint64_t key = stream_seed(seed, Stream::kProbabilities);
  std::vector<double> out(n);
  // Item-keyed generators keep the draw independent of the partitioning.
  constexpr std::size_t kChunk = 1 << 14;
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t end = std::min(n, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      SplitMix64 g = item_generator(key, i);
      boost::random::beta_distribution<double> beta(dist.alpha(), dist.beta());
      out[i] = beta(g);
    }
  });
  return out;
}

double apply_model(const SyntheticModel& model, double p) {
  if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
    throw ContractError("probability must lie in [0, 1], got " + format_double(p));
  }
  return model.map(p);
}

ScoredBatch generate_batch(const ProbDistribution& dist, const SyntheticModel& model,
                           std::size_t n, std::uint64_t seed) {
  ScoredBatch batch;
  batch.seed = seed;
  batch.true_p = sample_probs(dist, n, seed);
  const std::uint64_t key = stream_seed(seed, Stream::kOutcomes);
  std::vector<Prediction> items;
  items.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = batch.true_p[i];
    SplitMix64 g = item_generator(key, i);
    const int y = uniform01(g) < p ? 1 : 0;
    items.emplace_back(apply_model(model, p), y);
  }
  batch.predictions = PredictionSet(std::move(items));
  return batch;
}

}  // namespace calibkit
