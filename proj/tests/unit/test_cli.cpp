#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cvamend/cli.hpp"

namespace fs = std::filesystem;
using cvamend::cli::run;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    out.push_back(line);
  }
  return out;
}

// Fresh scratch directory under the working directory.
fs::path scratch(const std::string& name) {
  const fs::path dir = fs::current_path() / "cli_scratch" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("point reports the verdict") {
  const Outcome sep = invoke({"point", "--r", "1.3", "--eta", "0.15", "--variant", "phi1"});
  CHECK(sep.code == 0);
  CHECK(sep.out.find("verdict = separable / ConclusiveEB") != std::string::npos);
  CHECK(sep.out.find("delta = ") != std::string::npos);
  CHECK(sep.out.find("eta_threshold = 0.263399479904") != std::string::npos);

  const Outcome ent = invoke({"point", "--r", "1.3", "--eta", "0.15", "--variant", "phi2"});
  CHECK(ent.code == 0);
  CHECK(ent.out.find("verdict = entangled") != std::string::npos);

  const Outcome plain = invoke({"point", "--r", "1.3", "--eta", "0.15", "--uncertainty", "off"});
  CHECK(plain.out.find("verdict = separable\n") != std::string::npos);
  CHECK(plain.out.find("delta") == std::string::npos);
}

TEST_CASE("usage errors exit with 2") {
  const Outcome range = invoke({"point", "--eta", "1.5"});
  CHECK(range.code == 2);
  CHECK(range.err.find("1.5") != std::string::npos);

  CHECK(invoke({}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({"point", "--variant", "phi3"}).code == 2);
  CHECK(invoke({"point", "--uncertainty", "maybe"}).code == 2);
  CHECK(invoke({"sweep", "--eta-min", "0.8", "--eta-max", "0.2"}).code == 2);
  CHECK(invoke({"sweep", "--steps", "1"}).code == 2);
  CHECK(invoke({"threshold", "--r", "0"}).code == 2);
  CHECK(invoke({"reproduce", "fig9"}).code == 2);
  CHECK(invoke({"reproduce", "fig5", "--samples", "10", "--method", "monte-carlo"}).code == 2);
  CHECK(invoke({"point", "--config", "does-not-exist.cfg"}).code == 2);

  CHECK(invoke({"--help"}).code == 0);
  CHECK(invoke({"--version"}).code == 0);
}

TEST_CASE("sweep writes CSV and manifest") {
  const fs::path dir = scratch("sweep");
  const fs::path csv = dir / "out.csv";
  const Outcome o =
      invoke({"sweep", "--r", "1.3", "--steps", "2", "--uncertainty", "off", "--output", csv.string()});
  REQUIRE(o.code == 0);
  const auto rows = lines(slurp(csv));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "eta,nu2,delta,verdict,variant");
  CHECK(rows[1].rfind("0.01,", 0) == 0);
  CHECK(rows[2].rfind("0.99,", 0) == 0);
  CHECK(rows[1].find(",,") != std::string::npos);

  const auto manifest = nlohmann::json::parse(slurp(fs::path(csv.string() + ".manifest.json")));
  CHECK(manifest["tool"] == "cvamend");
  CHECK(manifest["grid"]["steps"] == 2);
  CHECK(manifest["configs"][0]["r"] == 1.3);
  CHECK(manifest["configs"][0]["uncertainty"] == "off");
  CHECK(manifest.contains("timestamp"));
  CHECK(manifest["output"] == csv.string());
}

TEST_CASE("lossless phi1 sweep flips verdict once, at the threshold") {
  const fs::path csv = scratch("flip") / "flip.csv";
  REQUIRE(invoke({"sweep", "--r", "-1.3", "--uncertainty", "off", "--output", csv.string()}).code == 0);
  const auto rows = lines(slurp(csv));
  REQUIRE(rows.size() == 198);
  int flips = 0;
  for (std::size_t i = 2; i < rows.size(); ++i) {
    const bool a = rows[i - 1].find("separable") != std::string::npos;
    const bool b = rows[i].find("separable") != std::string::npos;
    flips += a != b;
  }
  CHECK(flips == 1);
  CHECK(rows[51].rfind("0.26,", 0) == 0);
  CHECK(rows[51].find("separable") != std::string::npos);
  CHECK(rows[52].find("entangled") != std::string::npos);
}

TEST_CASE("reruns are byte-identical") {
  const fs::path dir = scratch("rerun");
  // Near-pure outputs close to eta = 1 reject most draws, so stop at 0.9.
  const std::vector<std::string> args{
      "sweep", "--r", "1.3", "--steps", "21", "--eta-max", "0.9", "--method", "monte-carlo",
      "--samples", "200", "--output", (dir / "a.csv").string()};
  REQUIRE(invoke(args).code == 0);
  const std::string first = slurp(dir / "a.csv");
  CHECK(lines(first).size() == 22);
  REQUIRE(invoke(args).code == 0);
  CHECK(slurp(dir / "a.csv") == first);
}

TEST_CASE("config file values sit between defaults and flags") {
  const fs::path dir = scratch("config");
  const fs::path cfg = dir / "run.cfg";
  {
    std::ofstream f(cfg);
    f << "r = 1.0\neta = 0.2\nvariant = phi2\nuncertainty = off\n";
  }
  const Outcome from_file = invoke({"point", "--config", cfg.string()});
  REQUIRE(from_file.code == 0);
  CHECK(from_file.out.find("r = 1 (r' = -0.5)") != std::string::npos);
  CHECK(from_file.out.find("eta = 0.2\n") != std::string::npos);
  CHECK(from_file.out.find("variant = phi2") != std::string::npos);

  const Outcome overridden = invoke({"point", "--config", cfg.string(), "--eta", "0.4"});
  REQUIRE(overridden.code == 0);
  CHECK(overridden.out.find("eta = 0.4\n") != std::string::npos);
  CHECK(overridden.out.find("r = 1 (r' = -0.5)") != std::string::npos);
  CHECK(overridden.out.find("tm = 1\n") != std::string::npos);
}

TEST_CASE("Monte Carlo on near-pure outputs is a runtime failure") {
  const Outcome o = invoke({"point", "--r", "1.3", "--eta", "0.99", "--method", "monte-carlo", "--samples", "1000"});
  CHECK(o.code == 1);
  CHECK(o.err.find("unphysical") != std::string::npos);
}

TEST_CASE("unwritable output exits with 1") {
  const fs::path dir = scratch("unwritable");
  const fs::path blocker = dir / "file";
  std::ofstream(blocker) << "x";
  const Outcome o = invoke({"sweep", "--steps", "2", "--output", (blocker / "out.csv").string()});
  CHECK(o.code == 1);
  CHECK_FALSE(o.err.empty());
  CHECK(invoke({"reproduce", "fig5", "--steps", "2", "--output", (blocker / "sub").string()}).code == 1);
}

TEST_CASE("threshold prints the analytic and bisection values") {
  const Outcome o = invoke({"threshold", "--r", "-1.3"});
  REQUIRE(o.code == 0);
  CHECK(o.out.find("eta_threshold_analytic = 0.263399479904") != std::string::npos);
  const auto pos = o.out.find("eta_threshold_bisection = ");
  REQUIRE(pos != std::string::npos);
  const double bisection = std::stod(o.out.substr(pos + 26));
  CHECK(std::abs(bisection - 0.2634) < 2e-3);

  const Outcome half = invoke({"threshold", "--r", "1.0"});
  CHECK(half.out.find("eta_threshold_analytic = 0.181788231536") != std::string::npos);

  const Outcome lossy = invoke({"threshold", "--r", "1.3", "--t0", "0.75", "--tm", "0.9"});
  REQUIRE(lossy.code == 0);
  CHECK(lossy.out.find("analytic") == std::string::npos);
  CHECK(lossy.out.find("eta_threshold_bisection") != std::string::npos);

  CHECK(invoke({"threshold", "--r", "1.3", "--variant", "phi2"}).code == 1);
}

TEST_CASE("reproduce presets") {
  const fs::path dir = scratch("reproduce");
  REQUIRE(invoke({"reproduce", "fig5", "--output", dir.string()}).code == 0);
  const auto fig5 = lines(slurp(dir / "fig5.csv"));
  REQUIRE(fig5.size() == 1 + 2 * 197);
  for (std::size_t i = 1; i < fig5.size(); ++i) {
    if (fig5[i].find(",phi2") != std::string::npos) {
      const double nu2 = std::stod(fig5[i].substr(fig5[i].find(',') + 1));
      CHECK(nu2 < 0.25);
    }
  }
  CHECK(fs::exists(dir / "fig5.csv.manifest.json"));

  REQUIRE(invoke({"reproduce", "fig7", "--steps", "11", "--output", dir.string()}).code == 0);
  CHECK(fs::exists(dir / "fig7_lossy.csv"));
  CHECK(fs::exists(dir / "fig7_ideal.csv"));
  const auto manifest = nlohmann::json::parse(slurp(dir / "fig7_lossy.csv.manifest.json"));
  CHECK(manifest["configs"][0]["t0"] == 0.75);
  CHECK(manifest["configs"][0]["tm"] == 0.9);
  CHECK(manifest["configs"][1]["variant"] == "phi2");

  REQUIRE(invoke({"reproduce", "fig6a", "--output", dir.string()}).code == 0);
  const auto fig6a = lines(slurp(dir / "fig6a.csv"));
  for (std::size_t i = 1; i < fig6a.size(); ++i) {
    CHECK(fig6a[i].find("ConclusiveEB") == std::string::npos);
  }
  REQUIRE(invoke({"reproduce", "fig6b", "--output", dir.string()}).code == 0);
  const std::string fig6b = slurp(dir / "fig6b.csv");
  CHECK(fig6b.find("ConclusiveEB,phi1") != std::string::npos);
}
