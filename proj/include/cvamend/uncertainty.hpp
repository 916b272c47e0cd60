#pragma once

// Statistical uncertainty of the witness nu^2 given per-element errors on a
// measured two-mode covariance matrix.

#include <cstddef>
#include <cstdint>
#include <string_view>

#include <Eigen/Dense>

#include "cvamend/symplectic.hpp"

namespace cvamend {

enum class PropagationMethod { FirstOrder, MonteCarlo };

/// Independent Gaussian errors on the upper triangle of the CM; each element
/// gets sigma_ij = max(absolute_floor, relative_sigma * |V_ij|).
///
/// The defaults are calibration placeholders, not measured homodyne
/// uncertainties. They are chosen so the r' = 0.5 Phi1 peak stays
/// inconclusive while r' = 0.65 gives a conclusive entanglement-breaking
/// window.
struct UncertaintyModel {
  double relative_sigma = 0.02;
  double absolute_floor = 0.005;
  std::size_t samples = 10000;
  std::uint64_t seed = 20130607;
  PropagationMethod method = PropagationMethod::FirstOrder;

  /// Throws std::invalid_argument on negative/non-finite sigmas, or fewer
  /// than 100 samples in Monte Carlo mode.
  void validate() const;

  Eigen::Matrix4d element_sigma(const Eigen::Matrix4d& v) const;
};

inline constexpr std::size_t kMinMonteCarloSamples = 100;

enum class Classification { ConclusiveEB, ConclusiveEntangled, Ambiguous };

std::string_view to_string(Classification c);

struct ConfidenceVerdict {
  double nu_squared = 0.0;
  double delta = 0.0;
  Classification classification = Classification::Ambiguous;
};

/// Central difference of nu^2 in V_ij with step max(1e-6, 1e-6 |V_ij|);
/// off-diagonal steps move V_ij and V_ji together. Throws
/// NonFiniteGradientError when either side lands beyond the radicand
/// boundary. For physical V the radicand stays non-negative under such
/// steps, so this only fires on raw, unvalidated matrices.
double nu_squared_derivative(const Eigen::Matrix4d& v, int i, int j);

/// delta(nu^2) by linear propagation of nu_squared_derivative.
double propagate_first_order(const CovMatrix& v, const UncertaintyModel& model);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std = 0.0;
  std::size_t accepted = 0;
  std::size_t skipped = 0;  ///< unphysical draws, excluded rather than projected
};

/// Sample mean/std of nu^2 over perturbed copies of V. Each draw has its own
/// generator seeded from (seed, draw index), so results are bit-identical
/// regardless of thread count. Throws NumericalError when more than half of
/// the draws are unphysical.
MonteCarloEstimate propagate_monte_carlo(const CovMatrix& v, const UncertaintyModel& model,
                                         unsigned threads = 0);

/// Dispatches on model.method; Monte Carlo returns the sample std.
double propagate(const CovMatrix& v, const UncertaintyModel& model);

/// Conclusive only when the distance from 1/4 exceeds twice the uncertainty.
ConfidenceVerdict classify(double nu_squared, double delta);

}  // namespace cvamend
