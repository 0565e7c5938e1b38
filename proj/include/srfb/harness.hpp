#pragma once

// Experiment execution: builds problems from a config, runs every seed,
// persists per-seed CSVs, the mean curve and a JSON summary.

#include "srfb/config.hpp"
#include "srfb/diagnostics.hpp"
#include "srfb/parallel.hpp"
#include "srfb/problems.hpp"
#include "srfb/solvers.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace srfb {

struct BuiltExperiment {
  std::optional<InclusionProblem> inclusion;
  std::optional<SaddleProblem> saddle;
  StepSchedule schedule = StepSchedule::constant(1.0);
  NoiseModel noise = NoiseModel::exact();
  Vector x0, x_prev, v0, v_prev;
};

/// Instantiates the problem, schedule, noise model and starting points.
/// Throws ConfigError when the config cannot be realized (dimension mismatch,
/// fraction_of_bound with mu = 0, ...).
BuiltExperiment build_experiment(const ExperimentConfig& cfg);

/// Admissibility of the configured run, evaluated exactly as `execute` does.
Admissibility assess_experiment(const ExperimentConfig& cfg, const BuiltExperiment& built);

/// Runs one seed without touching the filesystem.
RunResult run_seed(const ExperimentConfig& cfg, const BuiltExperiment& built, std::uint64_t seed);

struct ExecuteOptions {
  bool force = false;
  Execution execution = Execution::parallel;
};

struct RunSummary {
  nlohmann::json doc;
  std::vector<RunResult> runs;
  std::filesystem::path summary_path;
};

/// Metric used for mean curves and rate fits: dist_sq for inclusions with a
/// reference solution, ergodic_gap for games and smoothed saddles, else resid.
Metric primary_metric(const ExperimentConfig& cfg, const BuiltExperiment& built);

/// Theoretical slope for the rate fit, when one is stated: -1 for the
/// 1/(2 nu (n+1)) schedule and for the primal-dual ergodic gap.
std::optional<double> target_slope(const ExperimentConfig& cfg);

/// Full pipeline. Throws InadmissibleRun unless admissible or forced.
RunSummary execute(const ExperimentConfig& cfg, const ExecuteOptions& opts = {});

/// `n,gamma,dist_sq,resid,draw_err_sq,ergodic_gap,wall_ns` with empty fields
/// for absent metrics.
std::string records_csv(const std::vector<RunRecord>& records);

/// Shortest round-trip decimal form.
std::string format_double(double v);

/// Prints one table row per summary and writes `n value` data files next to
/// each summary. Throws ConfigError listing every missing path.
void report(const std::vector<std::filesystem::path>& summaries, std::ostream& out);

/// Executes the config once per value with `param` (dotted path) overridden.
/// Each run writes to <output_dir>/<param>=<value>. Returns summary paths.
std::vector<std::filesystem::path> sweep(const std::filesystem::path& config_file,
                                         const std::string& param,
                                         const std::vector<std::string>& values,
                                         const ExecuteOptions& opts);

}  // namespace srfb
