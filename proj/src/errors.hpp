#pragma once

#include <stdexcept>
#include <string>

namespace kinpred {

/// Bad caller input: out-of-range argument, malformed scene, violated precondition.
struct InvalidInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed file or JSON content.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical breakdown: non-PSD covariance, singular solve, non-finite value.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace kinpred
