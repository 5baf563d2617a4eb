#pragma once

#include <stdexcept>
#include <string>

namespace calibkit {

// Input or contract violation (bad file, out-of-range value, empty set).
// The CLI maps this to exit code 2.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical failure: non-convergent quadrature, diverging optimizer.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace calibkit
