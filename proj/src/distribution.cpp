#include "calibkit/distribution.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "calibkit/errors.hpp"

namespace calibkit {

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

ProbDistribution::ProbDistribution(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!std::isfinite(alpha) || !std::isfinite(beta) || alpha <= 0.0 || beta <= 0.0) {
    throw ContractError("beta distribution parameters must be finite and > 0, got (" +
                        format_double(alpha) + ", " + format_double(beta) + ")");
  }
  log_norm_ = std::lgamma(alpha) + std::lgamma(beta) - std::lgamma(alpha + beta);
}

double ProbDistribution::variance() const {
  const double s = alpha_ + beta_;
  return alpha_ * beta_ / (s * s * (s + 1.0));
}

double ProbDistribution::density(double p) const {
  if (p < 0.0 || p > 1.0) return 0.0;
  return std::exp((alpha_ - 1.0) * std::log(p) + (beta_ - 1.0) * std::log1p(-p) - log_norm_);
}

std::string ProbDistribution::name() const {
  return "beta(" + format_double(alpha_) + "," + format_double(beta_) + ")";
}

namespace {

double parse_number(std::string_view s, std::string_view whole) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ContractError("cannot parse distribution '" + std::string(whole) + "'");
  }
  return v;
}

}  // namespace

ProbDistribution parse_distribution(std::string_view text) {
  if (text == "uniform") return ProbDistribution::uniform();
  // beta(a,b) or beta:a,b
  std::string_view body = text;
  if (body.starts_with("beta(") && body.ends_with(")")) {
    body = body.substr(5, body.size() - 6);
  } else if (body.starts_with("beta:")) {
    body = body.substr(5);
  } else {
    throw ContractError("cannot parse distribution '" + std::string(text) +
                        "' (expected beta(a,b) or uniform)");
  }
  const auto comma = body.find(',');
  if (comma == std::string_view::npos) {
    throw ContractError("cannot parse distribution '" + std::string(text) + "'");
  }
  return {parse_number(body.substr(0, comma), text), parse_number(body.substr(comma + 1), text)};
}

}  // namespace calibkit
