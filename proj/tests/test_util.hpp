#pragma once

#include <cstdint>
#include <vector>

#include "calibkit/metrics.hpp"
#include "calibkit/rng.hpp"
#include "calibkit/summation.hpp"

namespace calibkit::testing {

// Random prediction set for property tests: size in [1, max_n], p_hat drawn
// uniformly with some mass placed exactly on 0, 0.5 and 1.
inline PredictionSet random_predictions(SplitMix64& g, std::size_t max_n) {
  const std::size_t n = 1 + static_cast<std::size_t>(g() % max_n);
  PredictionSet set;
  for (std::size_t i = 0; i < n; ++i) {
    double p = uniform01(g);
    switch (g() % 16) {
      case 0: p = 0.0; break;
      case 1: p = 0.5; break;
      case 2: p = 1.0; break;
      default: break;
    }
    set.add(Prediction(p, static_cast<int>(g() & 1)));
  }
  return set;
}

}  // namespace calibkit::testing
