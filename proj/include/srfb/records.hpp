#pragma once

#include "srfb/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace srfb {

/// Metrics recorded after the step that produced x_n.
struct RunRecord {
  long long n = 0;
  double gamma = 0.0;  // gamma_{n-1}, the step that produced x_n
  std::optional<double> dist_sq;
  double resid = 0.0;  // ||x_n - x_{n-1}||
  std::optional<double> draw_err_sq;
  std::optional<double> ergodic_gap;
  std::optional<std::int64_t> wall_ns;
};

/// Full iterate history of a run, indexed the way the iteration is written:
/// x(-1), x(0), ..., x(steps()); r(-1), ..., r(steps() - 1); gamma likewise.
struct Trajectory {
  std::vector<Vector> iterates;  // iterates[k] = x_{k-1}
  std::vector<Vector> draws;     // draws[k] = r_{k-1}
  std::vector<double> gammas;    // gammas[k] = gamma_{k-1}
  bool exact_oracle = true;

  long long steps() const noexcept { return static_cast<long long>(iterates.size()) - 2; }
  const Vector& x(long long n) const { return iterates.at(static_cast<std::size_t>(n + 1)); }
  const Vector& r(long long n) const { return draws.at(static_cast<std::size_t>(n + 1)); }
  double gamma(long long n) const { return gammas.at(static_cast<std::size_t>(n + 1)); }
  /// y_n = 2 x_n - x_{n-1}; y(-1) is taken to be x(0).
  Vector y(long long n) const { return n < 0 ? x(0) : Vector(2.0 * x(n) - x(n - 1)); }
};

}  // namespace srfb
