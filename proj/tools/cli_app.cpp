#include "cli_app.hpp"

#include "salpchain/artifacts_io.hpp"
#include "salpchain/config.hpp"
#include "salpchain/scenario.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace salpchain::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string out = "out";
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  int runs = 1;
  std::optional<double> at;
  bool sweep = false;
};

// Seed precedence: --seed, then SALPCHAIN_SEED, then the config file.
void applySeed(Scenario& s, const Options& o) {
  if (o.seed) {
    s.seed = *o.seed;
    return;
  }
  if (const char* env = std::getenv("SALPCHAIN_SEED"); env && *env) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0' || env[0] == '-') throw ConfigError("SALPCHAIN_SEED", "not a nonnegative integer");
    s.seed = v;
  }
}

OutputFormat parseFormat(const std::string& f) {
  return f == "json" ? OutputFormat::Json : OutputFormat::Csv;
}

std::vector<double> snapshotTimes(const Scenario& s) {
  std::vector<double> t;
  for (int k = 0; k * 0.2 <= s.duration + 1e-9; ++k) t.push_back(k * 0.2);
  return t;
}

void writeRun(const Scenario& s, const ScenarioRun& run, const Options& o, const fs::path& dir) {
  emit(run.artifacts, parseFormat(o.format), dir);
  writeTextFile(dir / "snapshots.csv", tableToCsv(snapshotTable(s, run, snapshotTimes(s))));
}

int simulate(const Options& o, std::ostream& out) {
  Scenario s = loadScenario(o.config);
  applySeed(s, o);
  RunOptions ro;
  ro.estimate = false;
  const ScenarioRun run = runScenario(s, ro);
  writeRun(s, run, o, o.out);
  out << "wrote " << run.times.size() << " samples to " << o.out << "\n";
  return kOk;
}

int estimateScenario(Scenario s, const Options& o, std::ostream& out) {
  applySeed(s, o);
  const fs::path root = o.out;
  if (o.runs == 1) {
    const ScenarioRun run = runScenario(s);
    writeRun(s, run, o, root);
    out << "wrote " << run.times.size() << " samples to " << root.string() << "\n";
    return kOk;
  }
  const MonteCarloResult mc = runMonteCarlo(s, o.runs);
  for (std::size_t r = 0; r < mc.runs.size(); ++r) {
    char name[32];
    std::snprintf(name, sizeof name, "run_%03zu", r);
    writeRun(s, mc.runs[r], o, root / name);
  }
  writeTextFile(root / "nees_summary.csv", tableToCsv(neesSummaryTable(mc.nees)));
  out << "wrote " << mc.runs.size() << " runs to " << root.string() << "\n";
  return kOk;
}

void printSample(std::ostream& out, const ObservabilitySample& smp) {
  char t[32];
  std::snprintf(t, sizeof t, "%.6g", smp.time);
  out << "t=" << t << " observable=" << (smp.report.observable ? "true" : "false")
      << " rank=" << smp.report.rank << "\n";
}

int observability(const Options& o, std::ostream& out) {
  Scenario s = loadScenario(o.config);
  applySeed(s, o);
  std::vector<double> times;
  if (o.at) {
    times.push_back(*o.at);
  } else {
    for (int k = 0; k < s.sampleCount(); ++k) times.push_back(k / s.imuRate);
  }
  for (const auto& smp : observabilitySweep(s, times)) printSample(out, smp);
  return kOk;
}

int referenceScenario(const Options& o, std::ostream& out) {
  const Scenario s = defaultReferenceScenario();
  writeTextFile(fs::path(o.out) / "config.json", scenarioToJson(s));
  return estimateScenario(s, o, out);
}

}  // namespace

int cliMain(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Free-floating thruster chain: simulation, IMU synthesis, UKF estimation"};
  app.require_subcommand(1);
  Options o;

  auto addCommon = [&](CLI::App* cmd, bool withConfig) {
    if (withConfig) cmd->add_option("config", o.config, "Scenario JSON file")->required();
    cmd->add_option("--seed", o.seed, "Master seed (overrides SALPCHAIN_SEED and the config)");
  };
  auto addOutput = [&](CLI::App* cmd) {
    cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
    cmd->add_option("--format", o.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
  };

  auto* sim = app.add_subcommand("simulate", "Truth trajectory and IMU measurements");
  addCommon(sim, true);
  addOutput(sim);

  auto* est = app.add_subcommand("estimate", "Simulation plus UKF, optionally Monte Carlo");
  addCommon(est, true);
  addOutput(est);
  est->add_option("--runs", o.runs, "Monte Carlo runs")->check(CLI::PositiveNumber);

  auto* obs = app.add_subcommand("observability", "Thruster observability conditions");
  addCommon(obs, true);
  auto* at = obs->add_option("--at", o.at, "Evaluate at one time (s)");
  obs->add_flag("--sweep", o.sweep, "Evaluate at every sample (default)")->excludes(at);

  auto* reference = app.add_subcommand("paper-scenario", "Write the default config, then estimate");
  addCommon(reference, false);
  addOutput(reference);
  reference->add_option("--runs", o.runs, "Monte Carlo runs")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (sim->parsed()) return simulate(o, out);
    if (est->parsed()) return estimateScenario(loadScenario(o.config), o, out);
    if (obs->parsed()) return observability(o, out);
    return referenceScenario(o, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::out_of_range& e) {
    err << "out of range: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
}

int cliMain(int argc, const char* const* argv) { return cliMain(argc, argv, std::cout, std::cerr); }

}  // namespace salpchain::cli
