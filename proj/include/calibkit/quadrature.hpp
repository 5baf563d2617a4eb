#pragma once

#include <cstddef>
#include <functional>

#include "calibkit/distribution.hpp"

namespace calibkit {

// Composite Gauss-Legendre rule over [0, 1] weighted by a beta density.
struct QuadratureSpec {
  std::size_t nodes = 256;          // initial node count, >= 64
  bool endpoint_substitution = true;  // p = sin^2(theta) when a shape parameter is < 1
  std::size_t max_nodes = 1 << 17;
  double tolerance = 1e-6;          // allowed change when the node count doubles
};

struct QuadratureResult {
  double value = 0.0;
  std::size_t nodes = 0;       // nodes used by the accepted estimate
  double last_change = 0.0;    // |estimate(nodes) - estimate(nodes / 2)|
};

// Integrates h(p) * density(p) over [0, 1], with a panel boundary at `split`
// so a discontinuity or kink of h there never falls inside a panel. Doubles
// the node count until successive estimates agree to spec.tolerance (absolute
// for |value| <= 1, relative above). Throws NumericalError when the cap is
// reached first.
QuadratureResult integrate_against(const ProbDistribution& dist,
                                   const std::function<double(double)>& h, double split,
                                   const QuadratureSpec& spec = {});

}  // namespace calibkit
