#include "cvamend/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/chrono.h>
#include <fmt/format.h>
#include <json.hpp>

#include "cvamend/errors.hpp"
#include "cvamend/witness.hpp"

namespace cvamend::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr double kThresholdTol = 1e-6;
constexpr double kThresholdLo = 1e-3;
constexpr double kThresholdHi = 0.999;

// Raised for input that parses but is semantically invalid; maps to exit 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Options {
  double r = 1.3;
  double eta = 0.5;
  double eta_min = 0.01;
  double eta_max = 0.99;
  std::size_t steps = 197;
  double t0 = 1.0;
  double tm = 1.0;
  std::string variant = "phi1";
  std::string uncertainty = "on";
  double sigma = 0.02;
  double floor = 0.005;
  std::size_t samples = 10000;
  std::uint64_t seed = 20130607;
  std::string method = "first-order";
  std::string output;
  std::string figure;
};

UncertaintyModel uncertainty_model(const Options& o) {
  UncertaintyModel m;
  m.relative_sigma = o.sigma;
  m.absolute_floor = o.floor;
  m.samples = o.samples;
  m.seed = o.seed;
  m.method = o.method == "monte-carlo" ? PropagationMethod::MonteCarlo : PropagationMethod::FirstOrder;
  return m;
}

ExperimentConfig experiment_config(const Options& o) {
  ExperimentConfig c;
  c.r = o.r;
  c.eta = o.eta;
  c.t0 = o.t0;
  c.tm = o.tm;
  if (o.uncertainty == "on") {
    c.uncertainty = uncertainty_model(o);
  }
  try {
    c.variant = parse_variant(o.variant);
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return c;
}

GridSpec grid_spec(const Options& o) {
  GridSpec g{o.eta_min, o.eta_max, o.steps};
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return g;
}

std::string number(double x) { return fmt::format("{:.12g}", x); }

json config_json(const ExperimentConfig& c) {
  json j = {{"r", c.r},   {"r_prime", c.r_prime()},         {"eta", c.eta},
            {"t0", c.t0}, {"tm", c.tm},                     {"variant", std::string(to_string(c.variant))},
            {"uncertainty", c.uncertainty ? "on" : "off"}};
  if (c.uncertainty) {
    const auto& u = *c.uncertainty;
    j["sigma"] = u.relative_sigma;
    j["floor"] = u.absolute_floor;
    j["samples"] = u.samples;
    j["seed"] = u.seed;
    j["method"] = u.method == PropagationMethod::MonteCarlo ? "monte-carlo" : "first-order";
  }
  return j;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(now));
}

json manifest_json(const std::string& command, const std::vector<SweepResult>& series, const fs::path& csv) {
  json configs = json::array();
  for (const auto& s : series) {
    configs.push_back(config_json(s.config));
  }
  const GridSpec& g = series.front().grid_spec;
  return json{{"tool", "cvamend"},
              {"version", std::string(kToolVersion)},
              {"command", command},
              {"configs", configs},
              {"grid", {{"eta_min", g.min}, {"eta_max", g.max}, {"steps", g.steps}}},
              {"output", csv.string()},
              {"timestamp", utc_timestamp()}};
}

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) {
    throw std::runtime_error(fmt::format("cannot open '{}' for writing", path.string()));
  }
  file << body;
  file.flush();
  if (!file) {
    throw std::runtime_error(fmt::format("failed writing '{}'", path.string()));
  }
}

void write_csv_with_manifest(const std::string& command, const std::vector<SweepResult>& series,
                             const fs::path& csv, std::ostream& out) {
  write_file(csv, format_csv(series));
  fs::path manifest = csv;
  manifest += ".manifest.json";
  write_file(manifest, manifest_json(command, series, csv).dump(2) + "\n");
  out << fmt::format("wrote {} ({} rows) and {}\n", csv.string(), series.size() * series.front().grid.size(),
                     manifest.string());
}

int cmd_point(const Options& o, std::ostream& out) {
  const ExperimentConfig config = experiment_config(o);
  const PointResult p = run_point(config);

  out << fmt::format("r = {} (r' = {})\n", number(config.r), number(config.r_prime()));
  out << fmt::format("eta = {}\nt0 = {}\ntm = {}\nvariant = {}\n", number(config.eta), number(config.t0),
                     number(config.tm), to_string(config.variant));
  out << fmt::format("nu2 = {}\n", number(p.witness.nu_squared));
  if (p.confidence) {
    out << fmt::format("delta = {}\n", number(p.confidence->delta));
  }
  const char* verdict = p.witness.entangled ? "entangled" : "separable";
  if (p.confidence) {
    out << fmt::format("verdict = {} / {}\n", verdict, to_string(p.confidence->classification));
  } else {
    out << fmt::format("verdict = {}\n", verdict);
  }
  if (config.r != 0.0) {
    out << fmt::format("eta_threshold = {} (lossless phi1, analytic)\n", number(eb_threshold(config.r_prime())));
  }
  return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  const ExperimentConfig config = experiment_config(o);
  const GridSpec grid = grid_spec(o);
  const fs::path csv = o.output.empty() ? fs::path("sweep.csv") : fs::path(o.output);
  std::vector<SweepResult> series{sweep_eta(config, grid)};
  write_csv_with_manifest("sweep", series, csv, out);
  return kExitOk;
}

int cmd_threshold(const Options& o, std::ostream& out) {
  if (o.r == 0.0) {
    throw UsageError("threshold needs r != 0 (r' = -r/2 = 0 has no finite threshold)");
  }
  ExperimentConfig config = experiment_config(o);
  config.uncertainty.reset();
  out << fmt::format("r = {} (r' = {})\n", number(config.r), number(config.r_prime()));
  out << fmt::format("t0 = {}\ntm = {}\nvariant = {}\n", number(config.t0), number(config.tm),
                     to_string(config.variant));
  if (config.ideal()) {
    out << fmt::format("eta_threshold_analytic = {}\n", number(eb_threshold(config.r_prime())));
  }
  const double flip = find_flip_eta(config, kThresholdTol, kThresholdLo, kThresholdHi);
  out << fmt::format("eta_threshold_bisection = {}\n", number(flip));
  return kExitOk;
}

std::vector<SweepResult> both_variants(ExperimentConfig config, const GridSpec& grid) {
  std::vector<SweepResult> series;
  for (auto v : {ChannelVariant::Phi1, ChannelVariant::Phi2}) {
    config.variant = v;
    series.push_back(sweep_eta(config, grid));
  }
  return series;
}

int cmd_reproduce(const Options& o, std::ostream& out) {
  const GridSpec grid = grid_spec(o);
  UncertaintyModel model = uncertainty_model(o);
  try {
    model.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const auto preset = [&](double r_prime, double t0, double tm, bool with_uncertainty) {
    ExperimentConfig c = ExperimentConfig::from_r_prime(r_prime);
    c.t0 = t0;
    c.tm = tm;
    if (with_uncertainty) {
      c.uncertainty = model;
    }
    return c;
  };

  // Everything is computed before the first file is written.
  std::vector<std::pair<std::string, std::vector<SweepResult>>> files;
  if (o.figure == "fig5") {
    files.emplace_back("fig5.csv", both_variants(preset(0.65, 1.0, 1.0, false), grid));
  } else if (o.figure == "fig6a") {
    files.emplace_back("fig6a.csv", both_variants(preset(0.5, 1.0, 1.0, true), grid));
  } else if (o.figure == "fig6b") {
    files.emplace_back("fig6b.csv", both_variants(preset(0.65, 1.0, 1.0, true), grid));
  } else if (o.figure == "fig7") {
    files.emplace_back("fig7_lossy.csv", both_variants(preset(0.65, 0.75, 0.90, true), grid));
    files.emplace_back("fig7_ideal.csv", both_variants(preset(0.65, 1.0, 1.0, true), grid));
  } else {
    throw UsageError(fmt::format("unknown figure '{}'", o.figure));
  }

  const fs::path dir = o.output.empty() ? fs::path(".") : fs::path(o.output);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
  }
  for (const auto& [name, series] : files) {
    write_csv_with_manifest("reproduce " + o.figure, series, dir / name, out);
  }
  return kExitOk;
}

}  // namespace

std::string verdict_label(const PointResult& point) {
  if (point.confidence) {
    return std::string(to_string(point.confidence->classification));
  }
  return point.witness.entangled ? "entangled" : "separable";
}

std::string format_csv(const std::vector<SweepResult>& series) {
  std::string body(kCsvHeader);
  body += '\n';
  for (const auto& s : series) {
    const auto variant = to_string(s.config.variant);
    for (const auto& p : s.points) {
      const std::string delta = p.confidence ? number(p.confidence->delta) : std::string();
      body += fmt::format("{},{},{},{},{}\n", number(p.eta), number(p.witness.nu_squared), delta,
                          verdict_label(p), variant);
    }
  }
  return body;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Gaussian amendable-channel simulator: PPT witness of the two-beam-splitter scheme", "cvamend"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.set_config("--config", "", "Flat key = value file; keys mirror flag names");
  app.require_subcommand(1);

  const auto transmissivity = CLI::Range(0.0, 1.0);
  app.add_option("--r", o.r, "OPO two-mode squeeze r (probe squeeze r' = -r/2)")
      ->check(CLI::Range(-kMaxSqueeze, kMaxSqueeze))
      ->capture_default_str();
  app.add_option("--eta", o.eta, "Channel transmissivity")->check(transmissivity)->capture_default_str();
  app.add_option("--eta-min", o.eta_min, "Sweep lower edge")->check(transmissivity)->capture_default_str();
  app.add_option("--eta-max", o.eta_max, "Sweep upper edge")->check(transmissivity)->capture_default_str();
  app.add_option("--steps", o.steps, "Sweep grid points")->check(CLI::Range(2, 1000000))->capture_default_str();
  app.add_option("--t0", o.t0, "Source-loss transmissivity T0")->check(transmissivity)->capture_default_str();
  app.add_option("--tm", o.tm, "Detection transmissivity Tm")->check(transmissivity)->capture_default_str();
  app.add_option("--variant", o.variant, "Channel under test")
      ->check(CLI::IsMember({"phi1", "phi2"}, CLI::ignore_case))
      ->transform([](std::string s) {
        std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
        return s;
      })
      ->capture_default_str();
  app.add_option("--uncertainty", o.uncertainty, "Propagate measurement uncertainty")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  app.add_option("--sigma", o.sigma, "Relative per-element standard deviation")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--floor", o.floor, "Absolute per-element standard deviation floor")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--samples", o.samples, "Monte Carlo draws")
      ->check(CLI::Range(std::size_t{1}, std::size_t{100000000}))
      ->capture_default_str();
  app.add_option("--seed", o.seed, "Monte Carlo seed")->capture_default_str();
  app.add_option("--method", o.method, "Uncertainty propagation")
      ->check(CLI::IsMember({"first-order", "monte-carlo"}))
      ->capture_default_str();
  app.add_option("--output", o.output, "CSV path (sweep) or output directory (reproduce)");

  auto* point = app.add_subcommand("point", "Evaluate the witness at one eta")->fallthrough();
  auto* sweep = app.add_subcommand("sweep", "Sweep eta and write CSV")->fallthrough();
  auto* threshold = app.add_subcommand("threshold", "Locate the entanglement-breaking threshold")->fallthrough();
  auto* reproduce = app.add_subcommand("reproduce", "Write the figure presets as CSV")->fallthrough();
  reproduce->add_option("figure", o.figure, "fig5 | fig6a | fig6b | fig7")
      ->required()
      ->check(CLI::IsMember({"fig5", "fig6a", "fig6b", "fig7"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*point) {
      return cmd_point(o, out);
    }
    if (*sweep) {
      return cmd_sweep(o, out);
    }
    if (*threshold) {
      return cmd_threshold(o, out);
    }
    if (*reproduce) {
      return cmd_reproduce(o, out);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace cvamend::cli
