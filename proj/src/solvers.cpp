#include "srfb/solvers.hpp"

#include <chrono>
#include <cmath>

namespace srfb {

namespace {

constexpr int kStopStreak = 10;
constexpr double kDivergenceNorm = 1e100;

bool blown_up(const Vector& x) { return !x.allFinite() || x.norm() > kDivergenceNorm; }

class Clock {
 public:
  explicit Clock(bool enabled) : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}
  std::optional<std::int64_t> elapsed() const {
    if (!enabled_) return std::nullopt;
    return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() -
                                                                 start_)
        .count();
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

void check_loop(const LoopConfig& cfg) {
  if (cfg.budget < 0) throw InvalidParameter("budget must be >= 0");
  if (cfg.record_every < 1) throw InvalidParameter("record_every must be >= 1");
  if (!(cfg.stop_tolerance >= 0.0)) throw InvalidParameter("stop_tolerance must be >= 0");
}

}  // namespace

std::string to_string(Termination t) {
  switch (t) {
    case Termination::budget:
      return "budget";
    case Termination::converged:
      return "converged";
    case Termination::diverged:
      return "diverged";
  }
  return "unknown";
}

SolverState initial_state(const Vector& x0, const Vector& x_prev, StochasticOracle& oracle) {
  require_dim(x_prev, x0.size(), "initial_state x_prev");
  return {x0, x_prev, 0, oracle.draw(-1, x0)};
}

SolverState initial_state(const Vector& x0, const Vector& x_prev, const MonotoneMap& b) {
  require_dim(x_prev, x0.size(), "initial_state x_prev");
  return {x0, x_prev, 0, b(x0)};
}

PrimalDualState initial_pd_state(const Vector& x0, const Vector& x_prev, const Vector& v0,
                                 const Vector& v_prev, StochasticOracle& h_oracle,
                                 StochasticOracle& l_oracle) {
  PrimalDualState s;
  s.primal = initial_state(x0, x_prev, h_oracle);
  s.dual = initial_state(v0, v_prev, l_oracle);
  s.ergodic_x = Vector::Zero(x0.size());
  s.ergodic_v = Vector::Zero(v0.size());
  return s;
}

Vector reflect(const Vector& x_curr, const Vector& x_prev) {
  require_dim(x_prev, x_curr.size(), "reflect");
  return 2.0 * x_curr - x_prev;
}

SolverState srfb_step(const SolverState& s, const ResolvableOperator& a, StochasticOracle& oracle,
                      double gamma) {
  require_positive(gamma, "srfb_step gamma");
  const Vector y = reflect(s.x_curr, s.x_prev);
  Vector r = oracle.draw(s.n, y);
  Vector next = a.resolvent(gamma, s.x_curr - gamma * r);
  return {std::move(next), s.x_curr, s.n + 1, std::move(r)};
}

SolverState rfb_step(const SolverState& s, const ResolvableOperator& a, const MonotoneMap& b,
                     double gamma) {
  require_positive(gamma, "rfb_step gamma");
  const Vector y = reflect(s.x_curr, s.x_prev);
  Vector r = b(y);
  Vector next = a.resolvent(gamma, s.x_curr - gamma * r);
  return {std::move(next), s.x_curr, s.n + 1, std::move(r)};
}

SolverState frb_step(const SolverState& s, const ResolvableOperator& a, const MonotoneMap& b,
                     double gamma) {
  require_positive(gamma, "frb_step gamma");
  require_dim(s.x_prev, s.x_curr.size(), "frb_step");
  Vector bx = b(s.x_curr);
  const Vector bx_prev = b(s.x_prev);
  Vector next = a.resolvent(gamma, s.x_curr - 2.0 * gamma * bx + gamma * bx_prev);
  return {std::move(next), s.x_curr, s.n + 1, std::move(bx)};
}

SolverState srpg_step(const SolverState& s, const ProxFunction& f, StochasticOracle& grad_oracle,
                      double gamma) {
  require_positive(gamma, "srpg_step gamma");
  const Vector y = reflect(s.x_curr, s.x_prev);
  Vector g = grad_oracle.draw(s.n, y);
  Vector next = f.prox(gamma, s.x_curr - gamma * g);
  return {std::move(next), s.x_curr, s.n + 1, std::move(g)};
}

PrimalDualState spd_step(const PrimalDualState& s, const ProxFunction& f, const ProxFunction& gstar,
                         const LinearMap& k, StochasticOracle& h_oracle, StochasticOracle& l_oracle,
                         double gamma) {
  require_positive(gamma, "spd_step gamma");
  require_dim(s.dual.x_curr, k.range_dim(), "spd_step dual");
  const Vector y = reflect(s.primal.x_curr, s.primal.x_prev);
  const Vector u = reflect(s.dual.x_curr, s.dual.x_prev);
  Vector gh = h_oracle.draw(s.primal.n, y);
  Vector gl = l_oracle.draw(s.dual.n, u);
  Vector x_next = f.prox(gamma, s.primal.x_curr - gamma * gh - gamma * k.adjoint(u));
  Vector v_next = gstar.prox(gamma, s.dual.x_curr - gamma * gl + gamma * k.apply(y));

  PrimalDualState out;
  out.ergodic_x = s.ergodic_x + gamma * x_next;
  out.ergodic_v = s.ergodic_v + gamma * v_next;
  out.weight = s.weight + gamma;
  out.primal = {std::move(x_next), s.primal.x_curr, s.primal.n + 1, std::move(gh)};
  out.dual = {std::move(v_next), s.dual.x_curr, s.dual.n + 1, std::move(gl)};
  return out;
}

std::pair<Vector, Vector> ergodic_average(const PrimalDualState& s) {
  if (!(s.weight > 0.0)) throw ContractViolation("ergodic_average: no step has been taken");
  return {s.ergodic_x / s.weight, s.ergodic_v / s.weight};
}

Admissibility assess(const InclusionProblem& p, const StochasticOracle& oracle, const LoopConfig& cfg) {
  InclusionConstants c{p.mu, p.A.modulus(), p.B.modulus(), p.A.domain_bound()};
  switch (cfg.kind) {
    case SolverKind::frb:
      return assess_frb(cfg.schedule, c);
    case SolverKind::rfb:
      return assess_inclusion(cfg.schedule, VarianceSchedule::zero(), c);
    case SolverKind::srfb:
    case SolverKind::srpg:
      return assess_inclusion(cfg.schedule, oracle.variance_schedule(), c);
    case SolverKind::spd:
      break;
  }
  throw InvalidParameter("solver spd requires a saddle problem");
}

Admissibility assess(const SaddleProblem& p, const StochasticOracle& h_oracle,
                     const StochasticOracle& l_oracle, const LoopConfig& cfg) {
  if (cfg.kind != SolverKind::spd) {
    throw InvalidParameter("solver " + to_string(cfg.kind) + " requires an inclusion problem");
  }
  SaddleConstants c{p.mu_h(), p.mu_l(), p.norm_k,
                    p.f.domain_radius().has_value() && p.gstar.domain_radius().has_value()};
  return assess_saddle(cfg.schedule, h_oracle.variance_schedule(), l_oracle.variance_schedule(), c);
}

RunResult run(const InclusionProblem& p, StochasticOracle& oracle, const LoopConfig& cfg,
              const Vector& x0, const std::optional<Vector>& x_prev) {
  check_loop(cfg);
  require_dim(x0, p.dim(), "run x0");
  require_finite(x0, "run x0");
  if ((cfg.kind == SolverKind::rfb || cfg.kind == SolverKind::frb) && !oracle.is_exact()) {
    throw InvalidParameter(to_string(cfg.kind) + " is a deterministic baseline and needs an exact oracle");
  }
  if (cfg.kind == SolverKind::srpg && !p.f) {
    throw InvalidParameter("srpg requires a composite problem with a proximable f");
  }

  RunResult out;
  out.admissibility = assess(p, oracle, cfg);
  if (!cfg.force && !out.admissibility.admissible()) throw InadmissibleRun(out.admissibility);

  const Vector xm1 = x_prev.value_or(x0);
  const bool via_oracle = cfg.kind == SolverKind::srfb || cfg.kind == SolverKind::srpg;
  SolverState s = via_oracle ? initial_state(x0, xm1, oracle) : initial_state(x0, xm1, p.B);
  const bool exact = oracle.is_exact();

  if (cfg.keep_trajectory) {
    Trajectory t;
    t.exact_oracle = exact;
    t.iterates = {s.x_prev, s.x_curr};
    t.draws = {s.last_draw};
    t.gammas = {cfg.schedule(-1)};
    out.trajectory = std::move(t);
  }

  const Clock clock(cfg.record_wall_time);
  int streak = 0;
  for (long long k = 0; k < cfg.budget; ++k) {
    const double gamma = cfg.schedule(k);
    const bool record = k % cfg.record_every == 0;
    const bool measure_draw = record && !exact && cfg.kind != SolverKind::frb;
    const Vector y = measure_draw ? reflect(s.x_curr, s.x_prev) : Vector();
    switch (cfg.kind) {
      case SolverKind::srfb:
        s = srfb_step(s, p.A, oracle, gamma);
        break;
      case SolverKind::rfb:
        s = rfb_step(s, p.A, p.B, gamma);
        break;
      case SolverKind::frb:
        s = frb_step(s, p.A, p.B, gamma);
        break;
      case SolverKind::srpg:
        s = srpg_step(s, *p.f, oracle, gamma);
        break;
      case SolverKind::spd:
        throw InvalidParameter("solver spd requires a saddle problem");
    }
    out.iterations = k + 1;

    if (out.trajectory) {
      out.trajectory->iterates.push_back(s.x_curr);
      out.trajectory->draws.push_back(s.last_draw);
      out.trajectory->gammas.push_back(gamma);
    }
    if (blown_up(s.x_curr)) {
      out.termination = Termination::diverged;
      break;
    }

    const double resid = (s.x_curr - s.x_prev).norm();
    if (record) {
      RunRecord rec;
      rec.n = k + 1;
      rec.gamma = gamma;
      rec.resid = resid;
      if (p.known_zero) rec.dist_sq = (s.x_curr - *p.known_zero).squaredNorm();
      rec.draw_err_sq = measure_draw ? (s.last_draw - p.B(y)).squaredNorm() : 0.0;
      rec.wall_ns = clock.elapsed();
      out.records.push_back(rec);
    }

    streak = (cfg.stop_tolerance > 0.0 && resid < cfg.stop_tolerance) ? streak + 1 : 0;
    if (streak >= kStopStreak) {
      out.termination = Termination::converged;
      break;
    }
  }
  out.final_state = std::move(s);
  return out;
}

RunResult run(const SaddleProblem& p, StochasticOracle& h_oracle, StochasticOracle& l_oracle,
              const LoopConfig& cfg, const Vector& x0, const Vector& v0,
              const std::optional<Vector>& x_prev, const std::optional<Vector>& v_prev) {
  check_loop(cfg);
  require_dim(x0, p.primal_dim(), "run x0");
  require_dim(v0, p.dual_dim(), "run v0");
  require_finite(x0, "run x0");
  require_finite(v0, "run v0");

  RunResult out;
  out.admissibility = assess(p, h_oracle, l_oracle, cfg);
  if (!cfg.force && !out.admissibility.admissible()) throw InadmissibleRun(out.admissibility);

  PrimalDualState s =
      initial_pd_state(x0, x_prev.value_or(x0), v0, v_prev.value_or(v0), h_oracle, l_oracle);
  const bool exact = h_oracle.is_exact() && l_oracle.is_exact();
  const bool gap_available = p.kind != SaddleKind::generic;

  const Clock clock(cfg.record_wall_time);
  int streak = 0;
  for (long long k = 0; k < cfg.budget; ++k) {
    const double gamma = cfg.schedule(k);
    const Vector y = reflect(s.primal.x_curr, s.primal.x_prev);
    const Vector u = reflect(s.dual.x_curr, s.dual.x_prev);
    s = spd_step(s, p.f, p.gstar, p.K, h_oracle, l_oracle, gamma);
    out.iterations = k + 1;
    if (blown_up(s.primal.x_curr) || blown_up(s.dual.x_curr)) {
      out.termination = Termination::diverged;
      break;
    }

    const double resid = std::sqrt((s.primal.x_curr - s.primal.x_prev).squaredNorm() +
                                   (s.dual.x_curr - s.dual.x_prev).squaredNorm());
    if (k % cfg.record_every == 0) {
      RunRecord rec;
      rec.n = k + 1;
      rec.gamma = gamma;
      rec.resid = resid;
      if (p.known_saddle) {
        rec.dist_sq = (s.primal.x_curr - p.known_saddle->first).squaredNorm() +
                      (s.dual.x_curr - p.known_saddle->second).squaredNorm();
      }
      if (exact) {
        rec.draw_err_sq = 0.0;
      } else {
        rec.draw_err_sq = (s.primal.last_draw - p.h.gradient(y)).squaredNorm() +
                          (s.dual.last_draw - p.l.gradient(u)).squaredNorm();
      }
      if (gap_available) {
        const auto [xh, vh] = ergodic_average(s);
        rec.ergodic_gap = duality_gap(p, xh, vh);
      }
      rec.wall_ns = clock.elapsed();
      out.records.push_back(rec);
    }

    streak = (cfg.stop_tolerance > 0.0 && resid < cfg.stop_tolerance) ? streak + 1 : 0;
    if (streak >= kStopStreak) {
      out.termination = Termination::converged;
      break;
    }
  }
  out.final_state = s.primal;
  out.final_pd = std::move(s);
  return out;
}

}  // namespace srfb
