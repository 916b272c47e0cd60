#include "cvamend/witness.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "cvamend/errors.hpp"

namespace cvamend {

namespace {

constexpr double kRadicandTol = 1e-12;
constexpr double kMaxThresholdSqueeze = 10.0;

Eigen::Matrix4d as_fixed(const CovMatrix& v) {
  if (v.n_modes() != 2) {
    throw std::invalid_argument(fmt::format("witness needs a two-mode state, got {} modes", v.n_modes()));
  }
  return v.matrix();
}

}  // namespace

Eigen::Matrix4d partial_transpose(const Eigen::Matrix4d& v) {
  const Eigen::Vector4d flip(1.0, 1.0, 1.0, -1.0);
  return flip.asDiagonal() * v * flip.asDiagonal();
}

Eigen::Matrix4d partial_transpose(const CovMatrix& v) { return partial_transpose(as_fixed(v)); }

WitnessValue nu_squared_closed_form(const Eigen::Matrix4d& v) {
  const double det_a = v.block<2, 2>(0, 0).determinant();
  const double det_b = v.block<2, 2>(2, 2).determinant();
  const double det_c = v.block<2, 2>(0, 2).determinant();

  WitnessValue out;
  out.sigma = det_a + det_b - 2.0 * det_c;
  out.det_v = v.determinant();

  double radicand = out.sigma * out.sigma - 4.0 * out.det_v;
  if (radicand < 0.0) {
    if (radicand < -kRadicandTol) {
      throw NumericalError(fmt::format("negative radicand {} in nu^2 (unphysical input)", radicand));
    }
    radicand = 0.0;
  }
  out.nu_squared = 0.5 * (out.sigma - std::sqrt(radicand));
  out.entangled = out.nu_squared < kSeparabilityThreshold;
  return out;
}

WitnessValue nu_squared_closed_form(const CovMatrix& v) { return nu_squared_closed_form(as_fixed(v)); }

double nu_squared_oracle(const CovMatrix& v) {
  const Matrix pt = partial_transpose(v);
  const double nu_min = symplectic_spectrum_oracle(pt).front();
  return nu_min * nu_min;
}

double eb_threshold(double r_prime) {
  if (!std::isfinite(r_prime) || r_prime == 0.0 || std::abs(r_prime) > kMaxThresholdSqueeze) {
    throw std::invalid_argument(
        fmt::format("eb_threshold needs 0 < |r'| <= {}, got {}", kMaxThresholdSqueeze, r_prime));
  }
  const double c = std::cosh(2.0 * r_prime);
  const double s = std::sinh(r_prime);
  return 0.5 * (c - std::sqrt(2.0 * c - 1.0)) / (s * s);
}

}  // namespace cvamend
