#pragma once

// Gaussian channels in (X, Y) form, V -> X V X^T + Y.

#include <cstddef>

#include "cvamend/symplectic.hpp"

namespace cvamend {

class GaussianChannelXY {
 public:
  /// Rejects shape mismatches, asymmetric Y, and maps that fail complete
  /// positivity Y + (i/2)(Omega - X Omega X^T) >= 0.
  GaussianChannelXY(Matrix x, Matrix y);

  static GaussianChannelXY identity(std::size_t n_modes);

  std::size_t n_modes() const { return static_cast<std::size_t>(x_.rows() / 2); }
  const Matrix& x() const { return x_; }
  const Matrix& y() const { return y_; }

 private:
  Matrix x_;
  Matrix y_;
};

/// Smallest eigenvalue of the real embedding of Y + (i/2)(Omega - X Omega X^T).
/// Non-negative (up to rounding) exactly when the channel is completely positive.
double cp_margin(const Matrix& x, const Matrix& y);

GaussianChannelXY attenuation(double eta);
GaussianChannelXY squeeze_channel(double r);

/// later o earlier.
GaussianChannelXY compose(const GaussianChannelXY& later, const GaussianChannelXY& earlier);

CovMatrix apply(const GaussianChannelXY& ch, const CovMatrix& v);

/// Acts with a single-mode channel on `mode`, identity elsewhere.
CovMatrix apply_to_mode(const GaussianChannelXY& ch, const CovMatrix& v, std::size_t mode);

/// Attenuation realized physically: mix with vacuum on B(eta), keep output 0.
CovMatrix dilation_attenuation(double eta, const CovMatrix& v);

/// Mix with a squeezed-vacuum ancilla V1(s) on B(eta), keep output 0.
/// Equals S(s/2) o Phi_At(eta) o S(-s/2).
CovMatrix ancilla_squeezer_step(double eta, const CovMatrix& v, double s_ancilla);

/// Local squeezing realized by an ancilla prepared as V1(s_ancilla).
/// V1(s) = S(s/2) V0 S(s/2), hence the factor of one half.
constexpr double effective_squeeze(double s_ancilla) { return 0.5 * s_ancilla; }

/// Phi_At(eta) o S(r) o Phi_At(eta)
GaussianChannelXY phi1(double eta, double r);
/// Phi_At(eta) o Phi_At(eta)
GaussianChannelXY phi2(double eta);

}  // namespace cvamend
