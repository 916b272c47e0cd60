#include "cvamend/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

#include "cvamend/channels.hpp"
#include "cvamend/errors.hpp"
#include "parallel.hpp"

namespace cvamend {

namespace {

void require_transmissivity(double value, const char* name) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::invalid_argument(fmt::format("{} = {} outside [0, 1]", name, value));
  }
}

// Feeds `side` into a fresh mode, mixes it with mode 0 on B(eta) and keeps
// the original modes.
CovMatrix mix_into_first_mode(const CovMatrix& register_cm, const CovMatrix& side, double eta) {
  const std::size_t n = register_cm.n_modes();
  const CovMatrix extended = tensor(register_cm, side);
  const CovMatrix mixed = apply_symplectic(embed_two_mode(beam_splitter(eta), 0, n, n + 1), extended);
  std::vector<std::size_t> keep(n);
  for (std::size_t k = 0; k < n; ++k) {
    keep[k] = k;
  }
  return partial_trace(mixed, keep);
}

}  // namespace

std::string_view to_string(ChannelVariant v) { return v == ChannelVariant::Phi1 ? "phi1" : "phi2"; }

ChannelVariant parse_variant(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "phi1") {
    return ChannelVariant::Phi1;
  }
  if (lower == "phi2") {
    return ChannelVariant::Phi2;
  }
  throw std::invalid_argument(fmt::format("unknown channel variant '{}' (expected phi1 or phi2)", text));
}

double ExperimentConfig::effective_squeeze() const { return cvamend::effective_squeeze(r); }

void ExperimentConfig::validate() const {
  if (!std::isfinite(r) || std::abs(r) > kMaxSqueeze) {
    throw std::invalid_argument(fmt::format("r = {} outside [-{}, {}]", r, kMaxSqueeze, kMaxSqueeze));
  }
  require_transmissivity(eta, "eta");
  require_transmissivity(t0, "t0");
  require_transmissivity(tm, "tm");
  if (uncertainty) {
    uncertainty->validate();
  }
}

Resources prepare_resources(double r, double t0) {
  require_transmissivity(t0, "t0");
  const auto source_loss = attenuation(t0);
  CovMatrix twin = tmsv_cm(r);
  twin = apply_to_mode(source_loss, twin, 0);
  twin = apply_to_mode(source_loss, twin, 1);

  const CovMatrix split = apply_symplectic(beam_splitter(0.5), twin);
  CovMatrix ancilla = partial_trace(split, {0});
  const CovMatrix b1 = partial_trace(split, {1});
  CovMatrix probe = apply_symplectic(beam_splitter(0.5), tensor(b1, vacuum_cm()));
  return Resources{std::move(ancilla), std::move(probe)};
}

CovMatrix run_channel_stage(const CovMatrix& probe, const CovMatrix& ancilla, double eta, ChannelVariant variant) {
  if (probe.n_modes() != 2) {
    throw std::invalid_argument(fmt::format("probe must have 2 modes, got {}", probe.n_modes()));
  }
  if (ancilla.n_modes() != 1) {
    throw std::invalid_argument(fmt::format("ancilla must have 1 mode, got {}", ancilla.n_modes()));
  }
  require_transmissivity(eta, "eta");
  const CovMatrix first_port = variant == ChannelVariant::Phi1 ? ancilla : vacuum_cm();
  const CovMatrix after_first = mix_into_first_mode(probe, first_port, eta);
  return mix_into_first_mode(after_first, vacuum_cm(), eta);
}

CovMatrix apply_detection_loss(const CovMatrix& v, double tm) {
  require_transmissivity(tm, "tm");
  const auto loss = attenuation(tm);
  CovMatrix out = v;
  for (std::size_t mode = 0; mode < v.n_modes(); ++mode) {
    out = apply_to_mode(loss, out, mode);
  }
  return out;
}

CovMatrix output_cm(const ExperimentConfig& config) {
  config.validate();
  const Resources res = prepare_resources(config.r, config.t0);
  const CovMatrix after_channel = run_channel_stage(res.probe, res.ancilla, config.eta, config.variant);
  return apply_detection_loss(after_channel, config.tm);
}

PointResult run_point(const ExperimentConfig& config) {
  const CovMatrix out = output_cm(config);
  PointResult result;
  result.eta = config.eta;
  result.witness = nu_squared_closed_form(out);
  if (config.uncertainty) {
    const double delta = propagate(out, *config.uncertainty);
    result.confidence = classify(result.witness.nu_squared, delta);
  }
  return result;
}

void GridSpec::validate() const {
  if (!(min >= 0.0 && min < max && max <= 1.0)) {
    throw std::invalid_argument(fmt::format("eta grid needs 0 <= min < max <= 1, got [{}, {}]", min, max));
  }
  if (steps < 2) {
    throw std::invalid_argument(fmt::format("eta grid needs at least 2 steps, got {}", steps));
  }
}

std::vector<double> GridSpec::values() const {
  validate();
  std::vector<double> grid(steps);
  const double span = max - min;
  for (std::size_t k = 0; k < steps; ++k) {
    grid[k] = min + span * static_cast<double>(k) / static_cast<double>(steps - 1);
  }
  grid.back() = max;
  return grid;
}

SweepResult sweep_eta(const ExperimentConfig& config, const GridSpec& grid, unsigned threads) {
  config.validate();
  SweepResult result{config, grid, grid.values(), {}};
  result.points.resize(result.grid.size());
  detail::parallel_for(
      result.grid.size(),
      [&](std::size_t k) {
        ExperimentConfig point = config;
        point.eta = result.grid[k];
        result.points[k] = run_point(point);
      },
      threads);
  return result;
}

double find_flip_eta(const ExperimentConfig& config, double tol, double lo, double hi) {
  if (!(tol > 0.0)) {
    throw std::invalid_argument(fmt::format("bisection tolerance must be positive, got {}", tol));
  }
  if (!(lo >= 0.0 && lo < hi && hi <= 1.0)) {
    throw std::invalid_argument(fmt::format("bisection bracket needs 0 <= lo < hi <= 1, got [{}, {}]", lo, hi));
  }
  ExperimentConfig probe = config;
  probe.uncertainty.reset();
  const auto entangled_at = [&](double eta) {
    probe.eta = eta;
    return nu_squared_closed_form(output_cm(probe)).entangled;
  };

  const bool lo_verdict = entangled_at(lo);
  if (lo_verdict == entangled_at(hi)) {
    throw NoVerdictFlipError(fmt::format("no flip: verdict is '{}' at both eta = {} and eta = {}",
                                         lo_verdict ? "entangled" : "separable", lo, hi));
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (entangled_at(mid) == lo_verdict) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

CurveSummary summarize(const SweepResult& sweep) {
  CurveSummary s;
  for (const auto& p : sweep.points) {
    if (p.witness.entangled) {
      continue;
    }
    if (!s.has_separable_region) {
      s.has_separable_region = true;
      s.separable_min_eta = p.eta;
      s.peak_nu_squared = p.witness.nu_squared;
      s.peak_eta = p.eta;
    }
    s.separable_max_eta = p.eta;
    if (p.witness.nu_squared > s.peak_nu_squared) {
      s.peak_nu_squared = p.witness.nu_squared;
      s.peak_eta = p.eta;
    }
  }
  return s;
}

}  // namespace cvamend
