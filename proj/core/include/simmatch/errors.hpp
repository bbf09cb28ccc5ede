#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace simmatch {

// Bad arguments or malformed input data (non-finite entries, size mismatch,
// unknown config keys, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An iterative numeric routine diverged, produced NaN, or hit its cap.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A function was evaluated outside the domain where its formula holds.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An internal invariant that the mathematics guarantees was observed broken.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace simmatch
