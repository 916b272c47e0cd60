#include "cvamend/channels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace cvamend {

namespace {

constexpr double kCpTol = 1e-9;
constexpr double kSymmetryTol = 1e-12;

void require_transmissivity(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::invalid_argument(fmt::format("transmissivity {} outside [0, 1]", eta));
  }
}

void require_single_mode(const CovMatrix& v, const char* what) {
  if (v.n_modes() != 1) {
    throw std::invalid_argument(fmt::format("{} expects a single-mode state, got {} modes", what, v.n_modes()));
  }
}

}  // namespace

double cp_margin(const Matrix& x, const Matrix& y) {
  const auto dim = x.rows();
  const Matrix omega = symplectic_form(static_cast<std::size_t>(dim / 2));
  const Matrix k = 0.5 * (omega - x * omega * x.transpose());
  // Hermitian Y + iK is PSD iff [[Y, -K], [K, Y]] is.
  Matrix embed(2 * dim, 2 * dim);
  embed << y, -k, k, y;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrized(embed), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

GaussianChannelXY::GaussianChannelXY(Matrix x, Matrix y) : x_(std::move(x)), y_(std::move(y)) {
  if (x_.rows() == 0 || x_.rows() % 2 != 0 || x_.rows() != x_.cols() || y_.rows() != x_.rows() ||
      y_.cols() != x_.cols()) {
    throw std::invalid_argument(
        fmt::format("channel matrices must both be 2n x 2n, got X {}x{} and Y {}x{}", x_.rows(), x_.cols(),
                    y_.rows(), y_.cols()));
  }
  const double asym = (y_ - y_.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTol * std::max(1.0, y_.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument(fmt::format("channel Y is not symmetric (deviation {})", asym));
  }
  y_ = symmetrized(y_);
  const double scale = std::max({1.0, x_.cwiseAbs().maxCoeff() * x_.cwiseAbs().maxCoeff(), y_.cwiseAbs().maxCoeff()});
  const double margin = cp_margin(x_, y_);
  if (margin < -kCpTol * scale) {
    throw std::invalid_argument(fmt::format("channel is not completely positive (margin {})", margin));
  }
}

GaussianChannelXY GaussianChannelXY::identity(std::size_t n_modes) {
  if (n_modes == 0) {
    throw std::invalid_argument("identity channel needs at least one mode");
  }
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  return GaussianChannelXY(Matrix::Identity(dim, dim), Matrix::Zero(dim, dim));
}

GaussianChannelXY attenuation(double eta) {
  require_transmissivity(eta);
  return GaussianChannelXY(std::sqrt(eta) * Matrix::Identity(2, 2), 0.5 * (1.0 - eta) * Matrix::Identity(2, 2));
}

GaussianChannelXY squeeze_channel(double r) {
  return GaussianChannelXY(squeeze_transform(r).matrix(), Matrix::Zero(2, 2));
}

GaussianChannelXY compose(const GaussianChannelXY& later, const GaussianChannelXY& earlier) {
  if (later.n_modes() != earlier.n_modes()) {
    throw std::invalid_argument(
        fmt::format("cannot compose channels on {} and {} modes", later.n_modes(), earlier.n_modes()));
  }
  return GaussianChannelXY(later.x() * earlier.x(),
                           later.x() * earlier.y() * later.x().transpose() + later.y());
}

CovMatrix apply(const GaussianChannelXY& ch, const CovMatrix& v) {
  if (ch.n_modes() != v.n_modes()) {
    throw std::invalid_argument(
        fmt::format("channel acts on {} modes but state has {}", ch.n_modes(), v.n_modes()));
  }
  return CovMatrix(ch.x() * v.matrix() * ch.x().transpose() + ch.y());
}

CovMatrix apply_to_mode(const GaussianChannelXY& ch, const CovMatrix& v, std::size_t mode) {
  if (ch.n_modes() != 1) {
    throw std::invalid_argument("apply_to_mode expects a single-mode channel");
  }
  if (mode >= v.n_modes()) {
    throw std::out_of_range(fmt::format("mode {} outside {} modes", mode, v.n_modes()));
  }
  const auto dim = v.matrix().rows();
  const auto at = static_cast<Eigen::Index>(2 * mode);
  Matrix x = Matrix::Identity(dim, dim);
  Matrix y = Matrix::Zero(dim, dim);
  x.block(at, at, 2, 2) = ch.x();
  y.block(at, at, 2, 2) = ch.y();
  return CovMatrix(x * v.matrix() * x.transpose() + y);
}

CovMatrix dilation_attenuation(double eta, const CovMatrix& v) {
  require_single_mode(v, "dilation_attenuation");
  const CovMatrix mixed = apply_symplectic(beam_splitter(eta), tensor(v, vacuum_cm()));
  return partial_trace(mixed, {0});
}

CovMatrix ancilla_squeezer_step(double eta, const CovMatrix& v, double s_ancilla) {
  require_single_mode(v, "ancilla_squeezer_step");
  const CovMatrix mixed = apply_symplectic(beam_splitter(eta), tensor(v, squeezed_vacuum_cm(s_ancilla)));
  return partial_trace(mixed, {0});
}

GaussianChannelXY phi1(double eta, double r) {
  const auto loss = attenuation(eta);
  return compose(loss, compose(squeeze_channel(r), loss));
}

GaussianChannelXY phi2(double eta) {
  const auto loss = attenuation(eta);
  return compose(loss, loss);
}

}  // namespace cvamend
