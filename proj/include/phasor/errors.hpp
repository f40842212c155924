#pragma once

#include <stdexcept>
#include <string>

namespace phasor {

/// Raised when inputs violate an operation's preconditions (dimensions,
/// orders, malformed documents).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical kernel cannot produce a result (singular
/// samples, singular Sylvester operator, eigensolver failure).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace phasor
