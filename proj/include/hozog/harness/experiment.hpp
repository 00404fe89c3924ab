#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "hozog/harness/config.hpp"
#include "hozog/harness/trace.hpp"
#include "hozog/lipschitz.hpp"
#include "hozog/oracle.hpp"

namespace hozog::harness {

/// Process exit codes of the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNonFinite = 3;

/// The objective a config describes. Keeps whatever problem data the oracle
/// closes over alive for as long as the spec is in use.
ObjectiveSpec build_objective(const ExperimentConfig& cfg);

struct RunResult {
  int exit_code = kExitOk;
  std::string message;  // empty on success
  std::vector<TraceRecord> records;
  Vector final_lambda;
  double final_f = 0.0;
  std::size_t optimizer_calls = 0;
  std::size_t metric_calls = 0;
  std::size_t failed_samples = 0;  // random search only
};

/// Runs one experiment: streams the CSV trace to cfg.trace_path and writes
/// the manifest to cfg.manifest_path. Never throws for run-time failures;
/// they are mapped onto exit codes and a message.
RunResult run_experiment(const ExperimentConfig& cfg);

/// load_config + run_experiment, with config errors mapped to kExitConfig.
RunResult run_experiment_file(const std::filesystem::path& config_path);

enum class SweepAxis { Q, Mu, Gamma };

SweepAxis parse_sweep_axis(const std::string& name);
std::string to_string(SweepAxis axis);

/// Copy of `base` with the swept value applied and trace/manifest paths
/// renamed to <stem>.<axis>-<value><ext>. Throws ConfigError for an invalid
/// value.
ExperimentConfig sweep_config(const ExperimentConfig& base, SweepAxis axis, double value);

struct SweepRun {
  double value = 0.0;
  std::filesystem::path trace_path;
  RunResult result;
};

/// One run per value. A failing run does not stop the others.
std::vector<SweepRun> sweep(const ExperimentConfig& base, SweepAxis axis, const std::vector<double>& values);

/// Analytic bound (synthetic problem with an iterative GD inner solver only,
/// NaN otherwise) next to the sampled ratio over the configured box.
LipschitzReport lipschitz_report(const ExperimentConfig& cfg);
nlohmann::json to_json(const LipschitzReport& report);

}  // namespace hozog::harness
