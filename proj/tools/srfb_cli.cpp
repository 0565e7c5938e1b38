// Command-line front end: run, validate, report, sweep.
// Exit codes: 0 success, 1 configuration error or refusal, 2 runtime error.

#include "srfb/harness.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

int validate(const std::string& path) {
  const srfb::ExperimentConfig cfg = srfb::load_config(path);
  const srfb::BuiltExperiment built = srfb::build_experiment(cfg);
  const srfb::Admissibility adm = srfb::assess_experiment(cfg, built);
  std::cout << "digest " << srfb::config_digest(cfg) << '\n';
  for (const auto& v : adm.verdicts) {
    std::cout << (v.holds ? "  [holds] " : "  [fails] ") << v.name << '\n';
    for (const auto& c : v.conditions) {
      std::cout << "      " << (c.holds ? "ok   " : "FAIL ") << c.name << ": " << c.detail << '\n';
    }
  }
  if (!adm.admissible()) {
    std::cout << "inadmissible (use run --force to execute anyway)\n";
    return 1;
  }
  std::cout << "admissible\n";
  return 0;
}

int run(const std::string& path, bool force, bool serial) {
  const srfb::ExperimentConfig cfg = srfb::load_config(path);
  srfb::ExecuteOptions opts;
  opts.force = force;
  opts.execution = serial ? srfb::Execution::serial : srfb::Execution::parallel;
  const srfb::RunSummary s = srfb::execute(cfg, opts);
  std::cout << "wrote " << s.summary_path.string() << '\n';
  const auto& fit = s.doc.at("fit");
  if (!fit.at("slope").is_null()) {
    std::cout << "fitted slope " << fit["slope"].get<double>() << " over [" << fit["window"][0] << ", "
              << fit["window"][1] << "]\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reflected forward-backward solvers and experiment harness"};
  app.require_subcommand(1);

  std::string config;
  bool force = false;
  bool serial = false;
  auto* run_cmd = app.add_subcommand("run", "Execute an experiment config");
  run_cmd->add_option("config", config, "Experiment JSON")->required();
  run_cmd->add_flag("--force", force, "Run even when no convergence guarantee applies");
  run_cmd->add_flag("--serial", serial, "Run seeds sequentially");

  auto* validate_cmd = app.add_subcommand("validate", "Check a config and report admissibility");
  validate_cmd->add_option("config", config, "Experiment JSON")->required();

  std::vector<std::string> summaries;
  auto* report_cmd = app.add_subcommand("report", "Tabulate summaries and write plot data");
  report_cmd->add_option("summaries", summaries, "summary.json files")->required();

  std::string param;
  std::vector<std::string> values;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a config once per parameter value");
  sweep_cmd->add_option("config", config, "Experiment JSON")->required();
  sweep_cmd->add_option("--param", param, "Dotted key path, e.g. schedule.gamma")->required();
  sweep_cmd->add_option("--values", values, "Values (JSON literals or strings)")->required()->delimiter(',');
  sweep_cmd->add_flag("--force", force, "Run even when no convergence guarantee applies");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run_cmd) return run(config, force, serial);
    if (*validate_cmd) return validate(config);
    if (*report_cmd) {
      std::vector<std::filesystem::path> paths(summaries.begin(), summaries.end());
      srfb::report(paths, std::cout);
      return 0;
    }
    if (*sweep_cmd) {
      srfb::ExecuteOptions opts;
      opts.force = force;
      for (const auto& p : srfb::sweep(config, param, values, opts)) std::cout << "wrote " << p.string() << '\n';
      return 0;
    }
  } catch (const srfb::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const srfb::InadmissibleRun& e) {
    std::cerr << "refused: " << e.what() << "\n(pass --force to run anyway)\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
