#include "calibkit/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "calibkit/errors.hpp"
#include "calibkit/summation.hpp"

namespace calibkit {

namespace {

constexpr std::size_t kPanelPoints = 16;
using Rule = boost::math::quadrature::gauss<double, kPanelPoints>;

template <typename F>
double composite(const F& f, double a, double b, std::size_t panels) {
  if (b <= a) return 0.0;
  CompensatedSum sum;
  const double width = (b - a) / static_cast<double>(panels);
  for (std::size_t k = 0; k < panels; ++k) {
    const double lo = a + width * static_cast<double>(k);
    const double hi = (k + 1 == panels) ? b : lo + width;
    sum.add(Rule::integrate(f, lo, hi));
  }
  return sum.value();
}

double estimate(const ProbDistribution& dist, const std::function<double(double)>& h,
                double split, bool substitute, std::size_t nodes) {
  const std::size_t panels = std::max<std::size_t>(1, nodes / (2 * kPanelPoints));
  if (!substitute) {
    auto f = [&](double p) { return h(p) * dist.density(p); };
    return composite(f, 0.0, split, panels) + composite(f, split, 1.0, panels);
  }
  // p = sin^2(t), dp = 2 sin(t) cos(t) dt; folds the density's endpoint
  // singularities into bounded powers of sin and cos.
  const double a = dist.alpha();
  const double b = dist.beta();
  const double log_norm = dist.log_normalizer();
  auto f = [&](double t) {
    const double s = std::sin(t);
    const double c = std::cos(t);
    const double w =
        2.0 * std::exp((2.0 * a - 1.0) * std::log(s) + (2.0 * b - 1.0) * std::log(c) - log_norm);
    return h(s * s) * w;
  };
  const double t_split = std::asin(std::sqrt(split));
  return composite(f, 0.0, t_split, panels) +
         composite(f, t_split, std::numbers::pi / 2.0, panels);
}

}  // namespace

QuadratureResult integrate_against(const ProbDistribution& dist,
                                   const std::function<double(double)>& h, double split,
                                   const QuadratureSpec& spec) {
  if (spec.nodes < 64) throw ContractError("quadrature needs at least 64 nodes");
  if (spec.max_nodes < 2 * spec.nodes) {
    throw ContractError("quadrature node cap must allow at least one doubling");
  }
  if (!(split >= 0.0 && split <= 1.0)) throw ContractError("quadrature split outside [0, 1]");

  const bool substitute =
      spec.endpoint_substitution && (dist.alpha() < 1.0 || dist.beta() < 1.0);
  std::size_t nodes = spec.nodes;
  double previous = estimate(dist, h, split, substitute, nodes);
  double change = 0.0;
  while (2 * nodes <= spec.max_nodes) {
    nodes *= 2;
    const double current = estimate(dist, h, split, substitute, nodes);
    change = std::fabs(current - previous);
    if (change <= spec.tolerance * std::max(1.0, std::fabs(current))) {
      return {current, nodes, change};
    }
    previous = current;
  }
  std::ostringstream msg;
  msg << "quadrature did not converge for " << dist.name() << ": last change " << change
      << " at " << nodes << " nodes exceeds tolerance " << spec.tolerance;
  throw NumericalError(msg.str());
}

}  // namespace calibkit
