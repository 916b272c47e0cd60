#include "cvamend/symplectic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "cvamend/errors.hpp"

namespace cvamend {

namespace {

constexpr double kPhysicalTol = 1e-9;
constexpr double kSymplecticTol = 1e-10;

void require_even_square(const Matrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols() || m.rows() % 2 != 0) {
    throw std::invalid_argument(
        fmt::format("{} must be a non-empty 2n x 2n matrix, got {}x{}", what, m.rows(), m.cols()));
  }
}

Matrix checked_symmetric(Matrix m) {
  require_even_square(m, "covariance matrix");
  return symmetrized(m);
}

void require_squeeze(double r) {
  if (!std::isfinite(r) || std::abs(r) > kMaxSqueeze) {
    throw std::invalid_argument(
        fmt::format("squeeze parameter {} outside [-{}, {}]", r, kMaxSqueeze, kMaxSqueeze));
  }
}

void require_transmissivity(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::invalid_argument(fmt::format("transmissivity {} outside [0, 1]", eta));
  }
}

}  // namespace

Matrix symplectic_form(std::size_t n_modes) {
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  Matrix omega = Matrix::Zero(dim, dim);
  for (Eigen::Index k = 0; k < dim; k += 2) {
    omega(k, k + 1) = 1.0;
    omega(k + 1, k) = -1.0;
  }
  return omega;
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

double physicality_tolerance(const Matrix& v) {
  return kPhysicalTol * std::max(1.0, v.cwiseAbs().maxCoeff());
}

std::vector<double> symplectic_spectrum_oracle(const Matrix& v) {
  require_even_square(v, "covariance matrix");
  const auto n = static_cast<std::size_t>(v.rows() / 2);
  const Matrix omega = symplectic_form(n);

  std::vector<double> raw;
  raw.reserve(2 * n);
  Eigen::SelfAdjointEigenSolver<Matrix> sym(symmetrized(v));
  if (sym.info() == Eigen::Success && sym.eigenvalues().minCoeff() > 0.0) {
    // A = V^(1/2) Omega V^(1/2) is antisymmetric with eigenvalues +/- i nu,
    // so A^T A carries each nu^2 twice.
    const Matrix root = sym.operatorSqrt();
    const Matrix a = root * omega * root;
    Eigen::SelfAdjointEigenSolver<Matrix> gram(a.transpose() * a, Eigen::EigenvaluesOnly);
    if (gram.info() != Eigen::Success) {
      throw NumericalError("eigen-solver failed on the symplectic Gram matrix");
    }
    for (Eigen::Index k = 0; k < gram.eigenvalues().size(); ++k) {
      raw.push_back(std::sqrt(std::max(0.0, gram.eigenvalues()[k])));
    }
  } else {
    Eigen::EigenSolver<Matrix> solver(omega * v, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
      throw NumericalError("eigen-solver failed on Omega V");
    }
    for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
      raw.push_back(std::abs(solver.eigenvalues()[k].imag()));
    }
  }
  std::sort(raw.begin(), raw.end());
  // Each nu appears twice; keep one of each pair.
  std::vector<double> spectrum;
  spectrum.reserve(n);
  for (std::size_t k = 0; k < raw.size(); k += 2) {
    spectrum.push_back(0.5 * (raw[k] + raw[k + 1]));
  }
  return spectrum;
}

std::vector<double> symplectic_spectrum_oracle(const CovMatrix& v) {
  return symplectic_spectrum_oracle(v.matrix());
}

bool is_physical(const Matrix& v) {
  if (v.rows() == 0 || v.rows() != v.cols() || v.rows() % 2 != 0 || !v.allFinite()) {
    return false;
  }
  // V + (i/2) Omega >= 0 through its real symmetric embedding
  // [[V, -Omega/2], [Omega/2, V]], which has the same spectrum doubled.
  const Eigen::Index dim = v.rows();
  const Matrix half_omega = 0.5 * symplectic_form(static_cast<std::size_t>(dim / 2));
  Matrix embedded(2 * dim, 2 * dim);
  const Matrix s = symmetrized(v);
  embedded << s, -half_omega, half_omega, s;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(embedded, Eigen::EigenvaluesOnly);
  return solver.info() == Eigen::Success && solver.eigenvalues().minCoeff() >= -physicality_tolerance(v);
}

CovMatrix::CovMatrix(Matrix entries) : entries_(checked_symmetric(std::move(entries))) {
  if (!is_physical(entries_)) {
    throw UnphysicalStateError("covariance matrix violates V + (i/2) Omega >= 0");
  }
}

Eigen::Matrix2d CovMatrix::block(std::size_t a, std::size_t b) const {
  if (a >= n_modes() || b >= n_modes()) {
    throw std::out_of_range(fmt::format("block ({}, {}) outside {} modes", a, b, n_modes()));
  }
  return entries_.block<2, 2>(static_cast<Eigen::Index>(2 * a), static_cast<Eigen::Index>(2 * b));
}

SymplecticTransform::SymplecticTransform(Matrix entries) : entries_(std::move(entries)) {
  require_even_square(entries_, "symplectic transform");
  const Matrix omega = symplectic_form(n_modes());
  const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
  const double err = (entries_ * omega * entries_.transpose() - omega).cwiseAbs().maxCoeff();
  if (!(err <= kSymplecticTol * scale * scale)) {
    throw std::invalid_argument(fmt::format("matrix is not symplectic (|S Omega S^T - Omega| = {})", err));
  }
}

SymplecticTransform SymplecticTransform::identity(std::size_t n_modes) {
  if (n_modes == 0) {
    throw std::invalid_argument("identity transform needs at least one mode");
  }
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  return SymplecticTransform(Matrix::Identity(dim, dim));
}

CovMatrix vacuum_cm() { return CovMatrix(0.5 * Matrix::Identity(2, 2)); }

CovMatrix squeezed_vacuum_cm(double r) {
  require_squeeze(r);
  Matrix v = Matrix::Zero(2, 2);
  v(0, 0) = 0.5 * std::exp(r);
  v(1, 1) = 0.5 * std::exp(-r);
  return CovMatrix(std::move(v));
}

CovMatrix tmsv_cm(double r) {
  require_squeeze(r);
  const double c = 0.5 * std::cosh(r);
  const double s = 0.5 * std::sinh(r);
  Matrix v(4, 4);
  // clang-format off
  v << c,  0,  s,  0,
       0,  c,  0, -s,
       s,  0,  c,  0,
       0, -s,  0,  c;
  // clang-format on
  return CovMatrix(std::move(v));
}

SymplecticTransform beam_splitter(double eta) {
  require_transmissivity(eta);
  const double t = std::sqrt(eta);
  const double u = std::sqrt(1.0 - eta);
  Matrix b(4, 4);
  // clang-format off
  b << t, 0,  u,  0,
       0, t,  0,  u,
       u, 0, -t,  0,
       0, u,  0, -t;
  // clang-format on
  return SymplecticTransform(std::move(b));
}

SymplecticTransform squeeze_transform(double r) {
  require_squeeze(r);
  Matrix s = Matrix::Zero(2, 2);
  s(0, 0) = std::exp(r);
  s(1, 1) = std::exp(-r);
  return SymplecticTransform(std::move(s));
}

SymplecticTransform direct_sum(const SymplecticTransform& a, const SymplecticTransform& b) {
  const auto da = a.matrix().rows();
  const auto db = b.matrix().rows();
  Matrix m = Matrix::Zero(da + db, da + db);
  m.topLeftCorner(da, da) = a.matrix();
  m.bottomRightCorner(db, db) = b.matrix();
  return SymplecticTransform(std::move(m));
}

CovMatrix apply_symplectic(const SymplecticTransform& s, const CovMatrix& v) {
  if (s.n_modes() != v.n_modes()) {
    throw std::invalid_argument(
        fmt::format("transform acts on {} modes but state has {}", s.n_modes(), v.n_modes()));
  }
  return CovMatrix(s.matrix() * v.matrix() * s.matrix().transpose());
}

CovMatrix tensor(const CovMatrix& a, const CovMatrix& b) {
  const auto da = a.matrix().rows();
  const auto db = b.matrix().rows();
  Matrix m = Matrix::Zero(da + db, da + db);
  m.topLeftCorner(da, da) = a.matrix();
  m.bottomRightCorner(db, db) = b.matrix();
  return CovMatrix(std::move(m));
}

CovMatrix partial_trace(const CovMatrix& v, std::span<const std::size_t> keep) {
  if (keep.empty()) {
    throw std::invalid_argument("partial_trace: keep list is empty");
  }
  std::vector<bool> seen(v.n_modes(), false);
  std::vector<Eigen::Index> rows;
  rows.reserve(2 * keep.size());
  for (auto mode : keep) {
    if (mode >= v.n_modes()) {
      throw std::out_of_range(fmt::format("partial_trace: mode {} outside {} modes", mode, v.n_modes()));
    }
    if (seen[mode]) {
      throw std::invalid_argument(fmt::format("partial_trace: mode {} listed twice", mode));
    }
    seen[mode] = true;
    rows.push_back(static_cast<Eigen::Index>(2 * mode));
    rows.push_back(static_cast<Eigen::Index>(2 * mode + 1));
  }
  return CovMatrix(v.matrix()(rows, rows));
}

CovMatrix partial_trace(const CovMatrix& v, std::initializer_list<std::size_t> keep) {
  return partial_trace(v, std::span<const std::size_t>(keep.begin(), keep.size()));
}

SymplecticTransform embed_two_mode(const SymplecticTransform& s4, std::size_t i, std::size_t j,
                                   std::size_t n_modes) {
  if (s4.n_modes() != 2) {
    throw std::invalid_argument("embed_two_mode expects a two-mode transform");
  }
  if (i == j || i >= n_modes || j >= n_modes) {
    throw std::invalid_argument(
        fmt::format("embed_two_mode: bad mode pair ({}, {}) for {} modes", i, j, n_modes));
  }
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  Matrix m = Matrix::Identity(dim, dim);
  const std::array<Eigen::Index, 4> idx{static_cast<Eigen::Index>(2 * i), static_cast<Eigen::Index>(2 * i + 1),
                                        static_cast<Eigen::Index>(2 * j), static_cast<Eigen::Index>(2 * j + 1)};
  for (Eigen::Index a = 0; a < 4; ++a) {
    for (Eigen::Index b = 0; b < 4; ++b) {
      m(idx[a], idx[b]) = s4.matrix()(a, b);
    }
  }
  return SymplecticTransform(std::move(m));
}

}  // namespace cvamend
