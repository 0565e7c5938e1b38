#pragma once

// Experiment configuration: JSON schema validation, defaults and a stable digest.

#include "srfb/admissibility.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace srfb {

/// Malformed or inconsistent configuration; maps to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  /// Problem, schedule and oracle specs after validation and normalization:
  /// defaults filled in and CSV references replaced by the matrices they hold.
  nlohmann::json problem;
  nlohmann::json schedule;
  nlohmann::json oracle;
  SolverKind solver = SolverKind::srfb;
  std::vector<std::uint64_t> seeds{0};
  long long budget = 0;
  long long record_every = 1;
  double stop_tolerance = 0.0;
  std::string output_dir = "results";
  std::optional<std::vector<double>> x0, x_prev, v0, v_prev;
  std::optional<std::pair<double, double>> fit_window;
  bool record_wall_time = false;

  bool is_saddle() const;
};

/// Parses and validates a JSON document. Relative CSV paths are resolved
/// against `base_dir`. Throws ConfigError naming the offending key or rule.
ExperimentConfig parse_config(const std::string& text,
                              const std::filesystem::path& base_dir = std::filesystem::path("."));

ExperimentConfig load_config(const std::filesystem::path& file);

/// Canonical JSON form with every default spelled out.
nlohmann::json to_json(const ExperimentConfig& cfg);

/// FNV-1a 64 of the canonical dump (sorted keys), as 16 hex digits.
std::string config_digest(const ExperimentConfig& cfg);

/// Sets `dotted.key.path` in a JSON document, creating objects as needed.
void set_dotted(nlohmann::json& doc, const std::string& path, const nlohmann::json& value);

/// Row-major comma-separated matrix without header.
std::vector<std::vector<double>> read_csv_matrix(const std::filesystem::path& file);

}  // namespace srfb
