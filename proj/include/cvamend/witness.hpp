#pragma once

// PPT separability test for two-mode Gaussian states.

#include <Eigen/Dense>

#include "cvamend/symplectic.hpp"

namespace cvamend {

/// nu^2 below this value certifies entanglement (vacuum variance 1/2).
inline constexpr double kSeparabilityThreshold = 0.25;

struct WitnessValue {
  double nu_squared = 0.0;  ///< squared minimum symplectic eigenvalue of the partial transpose
  double sigma = 0.0;       ///< det A + det B - 2 det C
  double det_v = 0.0;
  bool entangled = false;   ///< nu_squared < 1/4
};

/// Lambda V Lambda with Lambda = diag(1, 1, 1, -1): flips p of the second mode.
Eigen::Matrix4d partial_transpose(const Eigen::Matrix4d& v);
Eigen::Matrix4d partial_transpose(const CovMatrix& v);

/// Closed-form nu^2 from the 2x2 blocks [[A, C], [C^T, B]].
///
/// The raw-matrix overload accepts perturbed matrices that need not be
/// physical; it throws NumericalError only when the inner radicand is
/// negative beyond rounding.
WitnessValue nu_squared_closed_form(const Eigen::Matrix4d& v);
WitnessValue nu_squared_closed_form(const CovMatrix& v);

/// min symplectic eigenvalue of partial_transpose(V), squared, via the
/// spectrum of Omega V.
double nu_squared_oracle(const CovMatrix& v);

/// Transmissivity below which Phi1 is entanglement breaking for squeeze r'.
/// Even in r'; r' = 0 is rejected (csch^2 diverges).
double eb_threshold(double r_prime);

}  // namespace cvamend
