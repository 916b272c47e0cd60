#pragma once

// End-to-end model of the optical setup: a twin beam from one OPO is split
// into a squeezed ancilla and an entangled probe pair (c1, c2); c1 then
// crosses two beam splitters of transmissivity eta, the first fed with the
// ancilla (Phi1) or vacuum (Phi2). Fictitious beam splitters T0 and Tm model
// source losses and detector inefficiency.

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "cvamend/symplectic.hpp"
#include "cvamend/uncertainty.hpp"
#include "cvamend/witness.hpp"

namespace cvamend {

enum class ChannelVariant { Phi1, Phi2 };

std::string_view to_string(ChannelVariant v);
/// Accepts "phi1" / "phi2" (case-insensitive).
ChannelVariant parse_variant(std::string_view text);

struct ExperimentConfig {
  double r = 1.3;    ///< OPO two-mode squeeze; the probe squeeze is fixed to r' = -r/2
  double eta = 0.5;  ///< channel beam-splitter transmissivity
  double t0 = 1.0;   ///< source-loss transmissivity
  double tm = 1.0;   ///< detection transmissivity
  ChannelVariant variant = ChannelVariant::Phi1;
  std::optional<UncertaintyModel> uncertainty;

  static ExperimentConfig from_r_prime(double r_prime) {
    ExperimentConfig c;
    c.r = -2.0 * r_prime;
    return c;
  }

  double r_prime() const { return -0.5 * r; }
  /// Squeeze realized on c1 by the ancilla V1(r).
  double effective_squeeze() const;
  bool ideal() const { return t0 == 1.0 && tm == 1.0; }

  void validate() const;
};

struct Resources {
  CovMatrix ancilla;  ///< a1
  CovMatrix probe;    ///< (c1, c2)
};

/// Twin beam V2(r), source loss T0 on both polarizations, lambda/2 + PBS as
/// B(1/2) giving (a1, b1), then b1 mixed with vacuum on B(1/2).
Resources prepare_resources(double r, double t0);

/// Applies the two green beam splitters to mode c1 of the probe. The first
/// one is fed with `ancilla` for Phi1 and with vacuum for Phi2 (the ancilla
/// is then ignored); idlers are traced out.
CovMatrix run_channel_stage(const CovMatrix& probe, const CovMatrix& ancilla, double eta, ChannelVariant variant);

/// Phi_At(tm) on each mode.
CovMatrix apply_detection_loss(const CovMatrix& v, double tm);

/// Covariance matrix reaching the detectors.
CovMatrix output_cm(const ExperimentConfig& config);

struct PointResult {
  double eta = 0.0;
  WitnessValue witness;
  std::optional<ConfidenceVerdict> confidence;  ///< set when config.uncertainty is
};

PointResult run_point(const ExperimentConfig& config);

struct GridSpec {
  double min = 0.01;
  double max = 0.99;
  std::size_t steps = 197;

  void validate() const;
  /// Evenly spaced, endpoints exact.
  std::vector<double> values() const;
};

struct SweepResult {
  ExperimentConfig config;
  GridSpec grid_spec;
  std::vector<double> grid;
  std::vector<PointResult> points;  ///< same order as grid
};

/// run_point over the grid (config.eta is overridden per point). Points may
/// be evaluated concurrently; `threads` = 0 uses hardware concurrency.
SweepResult sweep_eta(const ExperimentConfig& config, const GridSpec& grid, unsigned threads = 0);

/// Bisection on the entangled/separable verdict within [lo, hi]; returns the
/// midpoint of a bracket no wider than tol. Throws NoVerdictFlipError when
/// both ends agree.
double find_flip_eta(const ExperimentConfig& config, double tol, double lo = 0.01, double hi = 0.99);

/// Separable region and nu^2 peak read off a sweep.
struct CurveSummary {
  bool has_separable_region = false;
  double separable_min_eta = 0.0;
  double separable_max_eta = 0.0;
  double peak_nu_squared = 0.0;
  double peak_eta = 0.0;
};

CurveSummary summarize(const SweepResult& sweep);

}  // namespace cvamend
