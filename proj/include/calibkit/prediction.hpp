#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace calibkit {

// A predicted win probability paired with the observed binary outcome.
class Prediction {
 public:
  // Throws ContractError when p_hat is not a finite value in [0, 1] or the
  // outcome is not 0/1.
  Prediction(double p_hat, int outcome);

  double p_hat() const { return p_hat_; }
  int outcome() const { return outcome_; }

  friend bool operator==(const Prediction&, const Prediction&) = default;

 private:
  double p_hat_;
  int outcome_;
};

// Ordered collection of predictions. May be empty; every metric rejects an
// empty set.
class PredictionSet {
 public:
  PredictionSet() = default;
  explicit PredictionSet(std::vector<Prediction> items) : items_(std::move(items)) {}

  // Builds a set from parallel columns; lengths must agree.
  static PredictionSet from_columns(std::span<const double> p_hat,
                                    std::span<const int> outcome);

  void add(Prediction p) { items_.push_back(p); }
  void reserve(std::size_t n) { items_.reserve(n); }

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const Prediction& operator[](std::size_t i) const { return items_[i]; }
  const std::vector<Prediction>& items() const { return items_; }

  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

  friend bool operator==(const PredictionSet&, const PredictionSet&) = default;

 private:
  std::vector<Prediction> items_;
};

}  // namespace calibkit
