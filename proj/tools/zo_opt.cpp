// zo-opt: runs zeroth-order optimization experiments from JSON configs,
// fits rate trends on their summaries, and checks the estimators.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "zo/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

int run_command(const std::string& config_path, const std::string& out_dir, int jobs, const std::string& verify) {
  zo::ExperimentConfig config;
  try {
    config = zo::load_config(config_path);
  } catch (const zo::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kExitValidation;
  }
  zo::RunSettings settings;
  settings.jobs = jobs;
  if (!out_dir.empty()) settings.out_dir = out_dir;
  if (!verify.empty()) settings.verify = verify == "on";

  zo::ExperimentResult result;
  try {
    result = zo::run_experiment(config, settings);
  } catch (const zo::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitRuntime;
  }
  for (const auto& run : result.runs)
    if (!run.ok) fmt::print(stderr, "run N={} seed={} failed: {}\n", run.N, run.seed, run.error);
  fmt::print("{} runs, {} failed; summary: {}\n", result.runs.size(), result.failed(), result.summary_file.string());
  return result.failed() > 0 ? kExitRuntime : kExitOk;
}

int trend_command(const std::string& summary_path, const std::string& criterion, const std::string& slope,
                  const std::string& algorithm, long d) {
  const auto colon = slope.find(':');
  double lo = 0, hi = 0;
  try {
    if (colon == std::string::npos) throw std::invalid_argument(slope);
    lo = std::stod(slope.substr(0, colon));
    hi = std::stod(slope.substr(colon + 1));
  } catch (const std::exception&) {
    fmt::print(stderr, "--slope expects LO:HI, got '{}'\n", slope);
    return kExitValidation;
  }
  zo::TrendReport report;
  try {
    const zo::CsvTable table = zo::read_csv(summary_path);
    report = zo::trend_check(table, criterion, lo, hi,
                             algorithm.empty() ? std::nullopt : std::optional<std::string>(algorithm),
                             d > 0 ? std::optional<long>(d) : std::nullopt);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitRuntime;
  }
  for (const auto& w : report.warnings) fmt::print(stderr, "warning: {}\n", w);
  fmt::print("{} {}: {}\n", report.pass ? "PASS" : "FAIL", criterion, report.note);
  return report.pass ? kExitOk : kExitValidation;
}

int validate_command(bool quick) {
  bool all = true;
  try {
    for (const auto& check : zo::validate_estimators(quick)) {
      fmt::print("{} {}: {}\n", check.pass ? "PASS" : "FAIL", check.name, check.detail);
      all = all && check.pass;
    }
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitRuntime;
  }
  return all ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zeroth-order stochastic optimization experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run every (N, seed) pair of a config");
  std::string config_path, out_dir, verify;
  int jobs = 1;
  run->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (overrides the config)");
  run->add_option("--jobs", jobs, "Concurrent runs")->check(CLI::PositiveNumber);
  run->add_option("--verify", verify, "Compute reference criteria")->check(CLI::IsMember({"on", "off"}));

  auto* trend = app.add_subcommand("trend", "Fit a log-log slope of a summary criterion against N");
  std::string summary_path, criterion, slope, algorithm;
  long d = 0;
  trend->add_option("summary", summary_path, "summary.csv")->required()->check(CLI::ExistingFile);
  trend->add_option("--criterion", criterion, "Criterion name, e.g. fw_gap or expected_fw_gap")->required();
  trend->add_option("--slope", slope, "Accepted slope range LO:HI")->required();
  trend->add_option("--algorithm", algorithm, "Only rows of this algorithm");
  trend->add_option("--dimension", d, "Only rows of this dimension");

  auto* validate = app.add_subcommand("validate-estimators", "Monte-Carlo checks of the estimators");
  bool quick = false;
  validate->add_flag("--quick", quick, "Use 10x fewer samples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitValidation;
  }

  if (*run) return run_command(config_path, out_dir, jobs, verify);
  if (*trend) return trend_command(summary_path, criterion, slope, algorithm, d);
  return validate_command(quick);
}
