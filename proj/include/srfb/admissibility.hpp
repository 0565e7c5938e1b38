#pragma once

// Which convergence guarantee, if any, covers a given combination of step
// schedule, noise variance and problem constants. Each guarantee is reported
// as a list of named conditions so that a refusal can say exactly what failed.

#include "srfb/oracles.hpp"
#include "srfb/schedules.hpp"

#include <optional>
#include <string>
#include <vector>

namespace srfb {

enum class SolverKind { srfb, rfb, frb, srpg, spd };

std::string to_string(SolverKind k);
/// Throws InvalidParameter for unknown names.
SolverKind solver_kind_from_string(const std::string& name);

struct Condition {
  std::string name;
  bool holds = false;
  std::string detail;
};

struct TheoremVerdict {
  /// weak_convergence, strong_convergence, strongly_monotone_rate,
  /// constant_step, frb_baseline or ergodic_gap.
  std::string name;
  bool holds = false;
  std::vector<Condition> conditions;

  /// "name (detail); ..." for every failing condition.
  std::string failures() const;
};

struct Admissibility {
  std::vector<TheoremVerdict> verdicts;

  bool admissible() const;
  const TheoremVerdict* find(const std::string& name) const;
  std::string refusal_reason() const;
};

struct InclusionConstants {
  double mu = 0.0;    // Lipschitz constant of B
  double nu_a = 0.0;  // strong monotonicity of A
  double nu_b = 0.0;  // strong monotonicity of B
  std::optional<double> domain_bound;
};

/// Verdicts for srfb, rfb and srpg runs. `variance` is nullopt when the noise
/// model has no closed form, which makes every variance condition undecidable.
Admissibility assess_inclusion(const StepSchedule& s, const std::optional<VarianceSchedule>& variance,
                               const InclusionConstants& c);

/// Verdict for the deterministic forward-reflected-backward baseline.
Admissibility assess_frb(const StepSchedule& s, const InclusionConstants& c);

struct SaddleConstants {
  double mu_h = 0.0;
  double mu_l = 0.0;
  double norm_k = 0.0;
  bool bounded_domains = false;
};

/// Verdict for primal-dual runs: schedule bound, weighted noise summability
/// for both gradient oracles, bounded domains and sum gamma_n = inf.
Admissibility assess_saddle(const StepSchedule& s, const std::optional<VarianceSchedule>& variance_h,
                            const std::optional<VarianceSchedule>& variance_l,
                            const SaddleConstants& c);

}  // namespace srfb
