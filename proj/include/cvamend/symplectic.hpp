#pragma once

// Covariance-matrix data model and symplectic linear algebra for n-mode
// Gaussian states. Quadratures are ordered (q1, p1, ..., qn, pn) and the
// vacuum has variance 1/2.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace cvamend {

using Matrix = Eigen::MatrixXd;

/// Largest |r| accepted by squeezing constructors; cosh(2 * 20) is still
/// comfortably inside double range.
inline constexpr double kMaxSqueeze = 20.0;

/// Canonical symplectic form: block diagonal with [[0, 1], [-1, 0]] per mode.
Matrix symplectic_form(std::size_t n_modes);

/// Second-moment matrix of an n-mode Gaussian state.
///
/// Construction symmetrizes the input and rejects anything that is not a
/// physical state, so every CovMatrix in circulation satisfies
/// V + (i/2) Omega >= 0.
class CovMatrix {
 public:
  explicit CovMatrix(Matrix entries);

  std::size_t n_modes() const { return static_cast<std::size_t>(entries_.rows() / 2); }
  const Matrix& matrix() const { return entries_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

  /// 2x2 block coupling modes a and b.
  Eigen::Matrix2d block(std::size_t a, std::size_t b) const;

 private:
  Matrix entries_;
};

/// Real 2n x 2n matrix with S Omega S^T = Omega, acting on CMs by congruence.
class SymplecticTransform {
 public:
  explicit SymplecticTransform(Matrix entries);

  static SymplecticTransform identity(std::size_t n_modes);

  std::size_t n_modes() const { return static_cast<std::size_t>(entries_.rows() / 2); }
  const Matrix& matrix() const { return entries_; }

 private:
  Matrix entries_;
};

CovMatrix vacuum_cm();
CovMatrix squeezed_vacuum_cm(double r);
CovMatrix tmsv_cm(double r);

SymplecticTransform beam_splitter(double eta);
SymplecticTransform squeeze_transform(double r);

/// S_a (+) S_b acting on the concatenated register.
SymplecticTransform direct_sum(const SymplecticTransform& a, const SymplecticTransform& b);

CovMatrix apply_symplectic(const SymplecticTransform& s, const CovMatrix& v);

/// Direct sum Va (+) Vb; modes of `a` come first.
CovMatrix tensor(const CovMatrix& a, const CovMatrix& b);

/// Principal submatrix on the listed modes, in the listed order.
CovMatrix partial_trace(const CovMatrix& v, std::span<const std::size_t> keep);
CovMatrix partial_trace(const CovMatrix& v, std::initializer_list<std::size_t> keep);

/// Lifts a two-mode transform onto modes (i, j) of an n-mode register.
SymplecticTransform embed_two_mode(const SymplecticTransform& s4, std::size_t i, std::size_t j,
                                   std::size_t n_modes);

/// Symplectic eigenvalues, one per mode, ascending. Positive-definite input
/// goes through V^(1/2) Omega V^(1/2); anything else through the spectrum of
/// Omega V. Accepts any real symmetric 2n x 2n matrix, including partial
/// transposes.
std::vector<double> symplectic_spectrum_oracle(const Matrix& v);
std::vector<double> symplectic_spectrum_oracle(const CovMatrix& v);

/// V + (i/2) Omega >= 0 within tolerance, which also forces V > 0.
bool is_physical(const Matrix& v);

/// Tolerance used by is_physical; grows with the matrix scale because the
/// eigen-solver error is relative to ||V||.
double physicality_tolerance(const Matrix& v);

/// Symmetric part (M + M^T) / 2.
Matrix symmetrized(const Matrix& m);

}  // namespace cvamend
