#pragma once

#include <stdexcept>
#include <string>

namespace cvamend {

/// Raised when a computation fails for numerical rather than usage reasons
/// (eigen-solver failure, radicand far below zero, too many rejected draws).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Central-difference gradient of the witness came out non-finite.
class NonFiniteGradientError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A matrix offered as a covariance matrix violates the uncertainty principle.
class UnphysicalStateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Bisection bracket does not straddle a verdict change.
class NoVerdictFlipError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cvamend
