#pragma once

// Iteration engines. The single-step functions are pure apart from the oracle
// draw; `run` drives them under a step schedule and records metrics.

#include "srfb/admissibility.hpp"
#include "srfb/operators.hpp"
#include "srfb/oracles.hpp"
#include "srfb/problems.hpp"
#include "srfb/records.hpp"
#include "srfb/schedules.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace srfb {

struct SolverState {
  Vector x_curr;     // x_n
  Vector x_prev;     // x_{n-1}
  long long n = 0;
  Vector last_draw;  // r_{n-1}
};

/// State at n = 0. last_draw is r_{-1} = draw(-1, x0).
SolverState initial_state(const Vector& x0, const Vector& x_prev, StochasticOracle& oracle);
/// Same for deterministic baselines: last_draw = B(x0).
SolverState initial_state(const Vector& x0, const Vector& x_prev, const MonotoneMap& b);

struct PrimalDualState {
  SolverState primal;
  SolverState dual;
  Vector ergodic_x;  // sum gamma_k x_{k+1}
  Vector ergodic_v;  // sum gamma_k v_{k+1}
  double weight = 0.0;
};

PrimalDualState initial_pd_state(const Vector& x0, const Vector& x_prev, const Vector& v0,
                                 const Vector& v_prev, StochasticOracle& h_oracle,
                                 StochasticOracle& l_oracle);

/// 2 x_curr - x_prev.
Vector reflect(const Vector& x_curr, const Vector& x_prev);

/// x_{n+1} = J_{gamma A}(x_n - gamma r_n) with r_n drawn at y_n = 2x_n - x_{n-1}.
SolverState srfb_step(const SolverState& s, const ResolvableOperator& a, StochasticOracle& oracle,
                      double gamma);

/// x_{n+1} = J_{gamma A}(x_n - 2 gamma B x_n + gamma B x_{n-1}). last_draw = B x_n.
SolverState frb_step(const SolverState& s, const ResolvableOperator& a, const MonotoneMap& b,
                     double gamma);

/// x_{n+1} = J_{gamma A}(x_n - gamma B(2 x_n - x_{n-1})).
SolverState rfb_step(const SolverState& s, const ResolvableOperator& a, const MonotoneMap& b,
                     double gamma);

/// x_{n+1} = prox_{gamma f}(x_n - gamma g_n), g_n a gradient draw at y_n.
SolverState srpg_step(const SolverState& s, const ProxFunction& f, StochasticOracle& grad_oracle,
                      double gamma);

/// One primal-dual step with a shared gamma for both blocks; the ergodic sums
/// gain gamma x_{n+1} and gamma v_{n+1}.
PrimalDualState spd_step(const PrimalDualState& s, const ProxFunction& f, const ProxFunction& gstar,
                         const LinearMap& k, StochasticOracle& h_oracle, StochasticOracle& l_oracle,
                         double gamma);

/// (x_hat_N, v_hat_N). Throws ContractViolation before the first step.
std::pair<Vector, Vector> ergodic_average(const PrimalDualState& s);

struct LoopConfig {
  SolverKind kind = SolverKind::srfb;
  StepSchedule schedule = StepSchedule::constant(1.0);
  long long budget = 0;
  long long record_every = 1;
  /// Stop once ||x_n - x_{n-1}|| < stop_tolerance for 10 consecutive steps;
  /// 0 disables the rule.
  double stop_tolerance = 0.0;
  bool force = false;
  bool keep_trajectory = false;
  bool record_wall_time = false;
};

enum class Termination { budget, converged, diverged };
std::string to_string(Termination t);

struct RunResult {
  std::vector<RunRecord> records;
  Termination termination = Termination::budget;
  long long iterations = 0;
  SolverState final_state;
  std::optional<PrimalDualState> final_pd;
  std::optional<Trajectory> trajectory;
  Admissibility admissibility;
};

/// Thrown when a run is refused because no guarantee covers its configuration.
class InadmissibleRun : public std::runtime_error {
 public:
  explicit InadmissibleRun(Admissibility a)
      : std::runtime_error(a.refusal_reason()), admissibility_(std::move(a)) {}
  const Admissibility& admissibility() const noexcept { return admissibility_; }

 private:
  Admissibility admissibility_;
};

/// Admissibility of an inclusion run, as `run` evaluates it.
Admissibility assess(const InclusionProblem& p, const StochasticOracle& oracle, const LoopConfig& cfg);
/// Admissibility of a primal-dual run.
Admissibility assess(const SaddleProblem& p, const StochasticOracle& h_oracle,
                     const StochasticOracle& l_oracle, const LoopConfig& cfg);

/// Inclusion solvers (srfb, rfb, frb, srpg). rfb and frb evaluate B directly
/// and require an exact oracle; srpg requires the composite form.
RunResult run(const InclusionProblem& p, StochasticOracle& oracle, const LoopConfig& cfg,
              const Vector& x0, const std::optional<Vector>& x_prev = std::nullopt);

/// Primal-dual solver.
RunResult run(const SaddleProblem& p, StochasticOracle& h_oracle, StochasticOracle& l_oracle,
              const LoopConfig& cfg, const Vector& x0, const Vector& v0,
              const std::optional<Vector>& x_prev = std::nullopt,
              const std::optional<Vector>& v_prev = std::nullopt);

}  // namespace srfb
