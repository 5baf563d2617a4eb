#pragma once

#include <string>
#include <string_view>

namespace calibkit {

// Operating condition: the distribution of ground-truth win probabilities.
// Only the beta family is supported; uniform is Beta(1, 1).
class ProbDistribution {
 public:
  // Throws ContractError unless both shape parameters are finite and > 0.
  ProbDistribution(double alpha, double beta);

  static ProbDistribution uniform() { return {1.0, 1.0}; }

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

  double mean() const { return alpha_ / (alpha_ + beta_); }
  double variance() const;
  double density(double p) const;
  // log of the beta function B(alpha, beta).
  double log_normalizer() const { return log_norm_; }

  // "beta(0.5,0.5)"; parse_distribution accepts this and "uniform".
  std::string name() const;

  friend bool operator==(const ProbDistribution& a, const ProbDistribution& b) {
    return a.alpha_ == b.alpha_ && a.beta_ == b.beta_;
  }

 private:
  double alpha_;
  double beta_;
  double log_norm_;
};

ProbDistribution parse_distribution(std::string_view text);

// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

}  // namespace calibkit
