#include "srfb/admissibility.hpp"

#include "srfb/types.hpp"

#include <sstream>

namespace srfb {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

Condition variance_condition(const std::string& name, const std::optional<VarianceSchedule>& variance,
                             const StepSchedule& s, VarianceCondition which) {
  const VarianceVerdict v = validate_variance(variance, s, which);
  return {name, v.passed(), to_string(v.verdict) + ": " + v.reason};
}

Condition step_bound(const StepSchedule& s, double mu) {
  if (mu == 0.0) return {"sup_gamma_below_(sqrt2-1)/mu", true, "mu = 0, no upper bound"};
  const double bound = kSqrt2MinusOne / mu;
  return {"sup_gamma_below_(sqrt2-1)/mu", strictly_below(s.sup(), bound),
          "sup gamma = " + num(s.sup()) + ", bound = " + num(bound)};
}

TheoremVerdict finish(std::string name, std::vector<Condition> conds) {
  TheoremVerdict v{std::move(name), true, std::move(conds)};
  for (const auto& c : v.conditions) v.holds = v.holds && c.holds;
  return v;
}

}  // namespace

std::string to_string(SolverKind k) {
  switch (k) {
    case SolverKind::srfb:
      return "srfb";
    case SolverKind::rfb:
      return "rfb";
    case SolverKind::frb:
      return "frb";
    case SolverKind::srpg:
      return "srpg";
    case SolverKind::spd:
      return "spd";
  }
  return "unknown";
}

SolverKind solver_kind_from_string(const std::string& name) {
  if (name == "srfb") return SolverKind::srfb;
  if (name == "rfb") return SolverKind::rfb;
  if (name == "frb") return SolverKind::frb;
  if (name == "srpg") return SolverKind::srpg;
  if (name == "spd") return SolverKind::spd;
  throw InvalidParameter("unknown solver kind '" + name + "' (expected srfb, rfb, frb, srpg or spd)");
}

std::string TheoremVerdict::failures() const {
  std::string out;
  for (const auto& c : conditions) {
    if (c.holds) continue;
    if (!out.empty()) out += "; ";
    out += c.name + " (" + c.detail + ")";
  }
  return out;
}

bool Admissibility::admissible() const {
  for (const auto& v : verdicts) {
    if (v.holds) return true;
  }
  return false;
}

const TheoremVerdict* Admissibility::find(const std::string& name) const {
  for (const auto& v : verdicts) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

std::string Admissibility::refusal_reason() const {
  std::string out = "no convergence guarantee applies:";
  for (const auto& v : verdicts) out += "\n  " + v.name + ": " + v.failures();
  return out;
}

Admissibility assess_inclusion(const StepSchedule& s, const std::optional<VarianceSchedule>& variance,
                               const InclusionConstants& c) {
  Admissibility a;
  const double t = tau(s, c.mu);

  a.verdicts.push_back(finish(
      "weak_convergence",
      {{"nondecreasing_schedule", s.nondecreasing(), s.kind_name()},
       step_bound(s, c.mu),
       {"tau_positive", tau_positive(s, c.mu), "tau = " + num(t)},
       variance_condition("variance_summable", variance, s, VarianceCondition::sum_finite)}));

  const double order = s.decay_order();
  a.verdicts.push_back(finish(
      "strong_convergence",
      {{"strictly_decreasing_schedule", s.strictly_decreasing(), s.kind_name()},
       step_bound(s, c.mu),
       {"gamma_in_l2_not_l1", order > 0.5 && order <= 1.0, "decay order " + num(order)},
       variance_condition("weighted_variance_summable", variance, s,
                          VarianceCondition::weighted_sum_finite),
       {"bounded_domain", c.domain_bound.has_value(),
        c.domain_bound ? "radius " + num(*c.domain_bound) : "dom A unbounded"},
       {"strongly_monotone_A_or_B", c.nu_a > 0.0 || c.nu_b > 0.0,
        "nu_A = " + num(c.nu_a) + ", nu_B = " + num(c.nu_b)}}));

  const bool sm_kind = s.kind() == ScheduleKind::strongly_monotone;
  a.verdicts.push_back(finish(
      "strongly_monotone_rate",
      {{"strongly_monotone_A", c.nu_a > 0.0, "nu_A = " + num(c.nu_a)},
       {"schedule_1/(2nu(n+1))", sm_kind && s.param_nu() <= c.nu_a,
        sm_kind ? "schedule nu = " + num(s.param_nu()) : s.kind_name()},
       variance_condition("variance_bounded", variance, s, VarianceCondition::bounded)}));

  a.verdicts.push_back(finish(
      "constant_step",
      {{"constant_schedule", s.kind() == ScheduleKind::constant, s.kind_name()},
       step_bound(s, c.mu),
       variance_condition("variance_summable", variance, s, VarianceCondition::sum_finite)}));
  return a;
}

Admissibility assess_frb(const StepSchedule& s, const InclusionConstants& c) {
  const double bound = c.mu > 0.0 ? 0.5 / c.mu : 0.0;
  Condition below{"sup_gamma_below_1/(2mu)", c.mu == 0.0 || strictly_below(s.sup(), bound),
                  c.mu == 0.0 ? "mu = 0" : "sup gamma = " + num(s.sup()) + ", bound = " + num(bound)};
  Admissibility a;
  a.verdicts.push_back(finish(
      "frb_baseline",
      {{"nonincreasing_schedule", s.nonincreasing(), s.kind_name()}, below}));
  return a;
}

Admissibility assess_saddle(const StepSchedule& s, const std::optional<VarianceSchedule>& variance_h,
                            const std::optional<VarianceSchedule>& variance_l,
                            const SaddleConstants& c) {
  const PdScheduleReport pd = validate_pd_schedule(s, c.mu_h, c.mu_l, c.norm_k);
  Admissibility a;
  a.verdicts.push_back(finish(
      "ergodic_gap",
      {{"nonincreasing_schedule", pd.nonincreasing, s.kind_name()},
       {"sup_gamma_below_1/(2mu)", pd.below_bound,
        "mu = " + num(pd.mu) + ", sup gamma = " + num(s.sup()) + ", bound = " + num(pd.bound)},
       variance_condition("weighted_variance_h_summable", variance_h, s,
                          VarianceCondition::weighted_sum_finite),
       variance_condition("weighted_variance_l_summable", variance_l, s,
                          VarianceCondition::weighted_sum_finite),
       {"bounded_domains", c.bounded_domains, c.bounded_domains ? "dom f, dom g* bounded" : "unbounded"},
       {"gamma_not_summable", s.decay_order() <= 1.0, "decay order " + num(s.decay_order())}}));
  return a;
}

}  // namespace srfb
