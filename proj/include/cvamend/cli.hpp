#pragma once

// Command-line front end. Kept in a library so the integration tests can
// drive it without spawning processes.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "cvamend/experiment.hpp"

namespace cvamend::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr std::string_view kCsvHeader = "eta,nu2,delta,verdict,variant";

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Runs the tool; args excludes the program name. Returns the exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Header plus one row per grid point of every series, 12 significant digits.
std::string format_csv(const std::vector<SweepResult>& series);

/// Verdict text for a CSV row: the confidence class when uncertainty is on,
/// otherwise "entangled" / "separable".
std::string verdict_label(const PointResult& point);

}  // namespace cvamend::cli
