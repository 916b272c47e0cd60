#include "cvamend/uncertainty.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

#include "cvamend/errors.hpp"
#include "cvamend/witness.hpp"
#include "parallel.hpp"

namespace cvamend {

namespace {

constexpr double kStepFloor = 1e-6;
constexpr double kStepRelative = 1e-6;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Eigen::Matrix4d two_mode(const CovMatrix& v) {
  if (v.n_modes() != 2) {
    throw std::invalid_argument(
        fmt::format("uncertainty propagation needs a two-mode state, got {} modes", v.n_modes()));
  }
  return v.matrix();
}

}  // namespace

void UncertaintyModel::validate() const {
  if (!std::isfinite(relative_sigma) || relative_sigma < 0.0) {
    throw std::invalid_argument(fmt::format("relative_sigma must be finite and >= 0, got {}", relative_sigma));
  }
  if (!std::isfinite(absolute_floor) || absolute_floor < 0.0) {
    throw std::invalid_argument(fmt::format("absolute_floor must be finite and >= 0, got {}", absolute_floor));
  }
  if (method == PropagationMethod::MonteCarlo && samples < kMinMonteCarloSamples) {
    throw std::invalid_argument(
        fmt::format("Monte Carlo needs at least {} samples, got {}", kMinMonteCarloSamples, samples));
  }
}

Eigen::Matrix4d UncertaintyModel::element_sigma(const Eigen::Matrix4d& v) const {
  return (relative_sigma * v.cwiseAbs()).cwiseMax(absolute_floor);
}

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::ConclusiveEB:
      return "ConclusiveEB";
    case Classification::ConclusiveEntangled:
      return "ConclusiveEntangled";
    case Classification::Ambiguous:
      return "Ambiguous";
  }
  return "Ambiguous";
}

double nu_squared_derivative(const Eigen::Matrix4d& v, int i, int j) {
  if (i < 0 || j < 0 || i > 3 || j > 3) {
    throw std::out_of_range(fmt::format("element ({}, {}) outside a 4x4 matrix", i, j));
  }
  const double h = std::max(kStepFloor, kStepRelative * std::abs(v(i, j)));
  Eigen::Matrix4d plus = v;
  Eigen::Matrix4d minus = v;
  plus(i, j) += h;
  minus(i, j) -= h;
  if (i != j) {
    plus(j, i) += h;
    minus(j, i) -= h;
  }
  double grad = std::numeric_limits<double>::quiet_NaN();
  try {
    grad = (nu_squared_closed_form(plus).nu_squared - nu_squared_closed_form(minus).nu_squared) / (2.0 * h);
  } catch (const NumericalError&) {
    // leaves grad as NaN
  }
  if (!std::isfinite(grad)) {
    throw NonFiniteGradientError(
        fmt::format("d(nu^2)/dV({},{}) is not finite; state sits on the radicand boundary", i, j));
  }
  return grad;
}

double propagate_first_order(const CovMatrix& v, const UncertaintyModel& model) {
  model.validate();
  const Eigen::Matrix4d base = two_mode(v);
  const Eigen::Matrix4d sigma = model.element_sigma(base);

  double variance = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = i; j < 4; ++j) {
      if (sigma(i, j) == 0.0) {
        continue;
      }
      const double grad = nu_squared_derivative(base, i, j);
      variance += grad * grad * sigma(i, j) * sigma(i, j);
    }
  }
  return std::sqrt(variance);
}

MonteCarloEstimate propagate_monte_carlo(const CovMatrix& v, const UncertaintyModel& model, unsigned threads) {
  model.validate();
  if (model.samples < kMinMonteCarloSamples) {
    throw std::invalid_argument(
        fmt::format("Monte Carlo needs at least {} samples, got {}", kMinMonteCarloSamples, model.samples));
  }
  const Eigen::Matrix4d base = two_mode(v);
  const Eigen::Matrix4d sigma = model.element_sigma(base);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  std::vector<double> values(model.samples, nan);
  detail::parallel_for(
      model.samples,
      [&](std::size_t k) {
        std::mt19937_64 engine(splitmix64(model.seed ^ splitmix64(k)));
        std::normal_distribution<double> normal(0.0, 1.0);
        Eigen::Matrix4d draw = base;
        for (int i = 0; i < 4; ++i) {
          for (int j = i; j < 4; ++j) {
            const double e = sigma(i, j) * normal(engine);
            draw(i, j) += e;
            if (i != j) {
              draw(j, i) += e;
            }
          }
        }
        if (!is_physical(draw)) {
          return;
        }
        try {
          values[k] = nu_squared_closed_form(draw).nu_squared;
        } catch (const NumericalError&) {
          // counted as skipped
        }
      },
      threads);

  MonteCarloEstimate out;
  double sum = 0.0;
  for (double x : values) {
    if (std::isnan(x)) {
      ++out.skipped;
    } else {
      ++out.accepted;
      sum += x;
    }
  }
  if (2 * out.skipped > model.samples) {
    throw NumericalError(fmt::format("{} of {} Monte Carlo draws were unphysical; uncertainty model too coarse",
                                     out.skipped, model.samples));
  }
  out.mean = sum / static_cast<double>(out.accepted);
  double ss = 0.0;
  for (double x : values) {
    if (!std::isnan(x)) {
      ss += (x - out.mean) * (x - out.mean);
    }
  }
  out.std = out.accepted > 1 ? std::sqrt(ss / static_cast<double>(out.accepted - 1)) : 0.0;
  return out;
}

double propagate(const CovMatrix& v, const UncertaintyModel& model) {
  if (model.method == PropagationMethod::MonteCarlo) {
    return propagate_monte_carlo(v, model).std;
  }
  return propagate_first_order(v, model);
}

ConfidenceVerdict classify(double nu_squared, double delta) {
  if (!(delta >= 0.0)) {
    throw std::invalid_argument(fmt::format("uncertainty must be >= 0, got {}", delta));
  }
  ConfidenceVerdict out{nu_squared, delta, Classification::Ambiguous};
  if (nu_squared - kSeparabilityThreshold > 2.0 * delta) {
    out.classification = Classification::ConclusiveEB;
  } else if (kSeparabilityThreshold - nu_squared > 2.0 * delta) {
    out.classification = Classification::ConclusiveEntangled;
  }
  return out;
}

}  // namespace cvamend
