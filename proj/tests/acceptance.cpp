// Acceptance checks. Prints one PASS/FAIL line per criterion; exit status 0
// only when every requested criterion passes.
// Usage: srfb_acceptance [--criterion k]

#include "srfb/diagnostics.hpp"
#include "srfb/parallel.hpp"
#include "srfb/problems.hpp"
#include "srfb/solvers.hpp"

#include "support.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace srfb;
using namespace testing_support;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

std::vector<std::uint64_t> seed_range(std::uint64_t count) {
  std::vector<std::uint64_t> s(count);
  for (std::uint64_t i = 0; i < count; ++i) s[i] = i;
  return s;
}

// dim-20 strongly monotone instance shared by criteria 1, 2 and 9
InclusionProblem dim20_instance() { return make_affine_inclusion(20, 1.0, 4.0, 1); }

Matrix pennies() {
  Matrix m(2, 2);
  m << 1, -1, -1, 1;
  return m;
}

Vector e1(Index n) { return Vector::Unit(n, 0); }

// 1: mean squared distance under the 1/(2(n+1)) schedule decays like log(n)/n
Outcome rate_strongly_monotone() {
  const InclusionProblem p = dim20_instance();
  LoopConfig cfg;
  cfg.schedule = StepSchedule::strongly_monotone(1.0);
  cfg.budget = 100000;
  cfg.record_every = 10;
  const auto runs = run_seeds<RunResult>(
      seed_range(50),
      [&](std::uint64_t seed) {
        StochasticOracle o(p.B, NoiseModel::gaussian(VarianceSchedule::constant(1.0)), seed);
        return run(p, o, cfg, Vector::Zero(20));
      },
      Execution::parallel);
  std::vector<std::vector<RunRecord>> records;
  for (const auto& r : runs) records.push_back(r.records);
  std::vector<std::pair<double, double>> curve;
  for (const auto& m : aggregate_expectation(records, Metric::dist_sq)) curve.emplace_back(m.n, m.mean);
  const RateFit fit = fit_rate(curve, 1e3, 1e5);
  return {fit.slope >= -1.15 && fit.slope <= -0.80,
          "mu " + fmt(p.mu) + ", slope " + fmt(fit.slope) + " over [1e3, 1e5], band [-1.15, -0.80]"};
}

// 2: exact oracle and constant step 0.9 (sqrt2-1)/mu reach 1e-8
Outcome deterministic_convergence() {
  const InclusionProblem p = dim20_instance();
  StochasticOracle o(p.B, NoiseModel::exact(), 0);
  LoopConfig cfg;
  cfg.kind = SolverKind::rfb;
  cfg.schedule = StepSchedule::constant(0.9 * kSqrt2MinusOne / p.mu);
  cfg.budget = 100000;
  const RunResult r = run(p, o, cfg, Vector::Zero(20));
  long long hit = -1;
  for (const auto& rec : r.records) {
    if (std::sqrt(*rec.dist_sq) <= 1e-8) {
      hit = rec.n;
      break;
    }
  }

  // rotation with an oversized step, forced; informational only
  Matrix s(2, 2);
  s << 0, 1, -1, 0;
  Vector b(2);
  b << 1, 0;
  const InclusionProblem rot = make_affine_inclusion(0.0, s, b);
  StochasticOracle ro(rot.B, NoiseModel::exact(), 0);
  LoopConfig rc;
  rc.kind = SolverKind::rfb;
  rc.schedule = StepSchedule::constant(1.5 * kSqrt2MinusOne / rot.mu);
  rc.budget = 10000;
  rc.force = true;
  const RunResult rr = run(rot, ro, rc, Vector::Zero(2));
  const std::string note = "; rotation at 1.5x bound: " + to_string(rr.termination) + " after " +
                           std::to_string(rr.iterations) + " steps, final dist " +
                           fmt(std::sqrt(*rr.records.back().dist_sq)) + " (recorded, not asserted)";
  return {hit > 0, (hit > 0 ? "dist <= 1e-8 at n = " + std::to_string(hit) : std::string("dist never <= 1e-8")) + note};
}

std::vector<std::pair<double, double>> gap_series(const RunResult& r) {
  std::vector<std::pair<double, double>> out;
  for (const auto& rec : r.records) out.emplace_back(static_cast<double>(rec.n - 1), *rec.ergodic_gap);
  return out;  // (N, gap(x_hat_N, v_hat_N))
}

// 3: deterministic ergodic gap rate on matching pennies
Outcome ergodic_rate_deterministic() {
  const SaddleProblem g = make_matrix_game(pennies());
  const double gamma = 0.45 / g.norm_k;
  const PdScheduleReport pd = validate_pd_schedule(StepSchedule::constant(gamma), 0.0, 0.0, g.norm_k);
  StochasticOracle h(g.h.gradient, NoiseModel::exact(), 0), l(g.l.gradient, NoiseModel::exact(), 0, 1);
  LoopConfig cfg;
  cfg.kind = SolverKind::spd;
  cfg.schedule = StepSchedule::constant(gamma);
  cfg.budget = 10001;
  const auto series = gap_series(run(g, h, l, cfg, e1(2), e1(2)));
  const RateFit fit = fit_rate(series, 1e2, 1e4);
  const double ratio = series[10000].second / series[100].second;
  const bool slope_ok = fit.slope >= -1.2 && fit.slope <= -0.8;
  const bool ratio_ok = ratio < 1e-2;
  return {pd.pass && slope_ok && ratio_ok,
          std::string("schedule check ") + (pd.pass ? "pass" : "FAIL") + ", slope " + fmt(fit.slope) +
              " (band [-1.2, -0.8] " + (slope_ok ? "ok" : "FAIL") + "), gap(1e4)/gap(1e2) = " + fmt(ratio) +
              " (< 1e-2 " + (ratio_ok ? "ok" : "FAIL") + ")"};
}

// 4: stochastic ergodic gap, 20 seeds
Outcome ergodic_bound_stochastic() {
  const SaddleProblem g = make_matrix_game(pennies());
  const double gamma0 = 0.45 / g.norm_k;
  const StepSchedule sched = StepSchedule::power(gamma0, 0.6);
  const VarianceSchedule var = VarianceSchedule::power(1.0, 2.0);
  const long long budget = 10000;
  LoopConfig cfg;
  cfg.kind = SolverKind::spd;
  cfg.schedule = sched;
  cfg.budget = budget;

  {
    StochasticOracle h(g.h.gradient, NoiseModel::gaussian(var), 0), l(g.l.gradient, NoiseModel::gaussian(var), 0, 1);
    if (!assess(g, h, l, cfg).admissible()) return {false, "schedule refused: " + assess(g, h, l, cfg).refusal_reason()};
  }
  const auto runs = run_seeds<RunResult>(
      seed_range(20),
      [&](std::uint64_t seed) {
        StochasticOracle h(g.h.gradient, NoiseModel::gaussian(var), seed, 0);
        StochasticOracle l(g.l.gradient, NoiseModel::gaussian(var), seed, 1);
        return run(g, h, l, cfg, e1(2), e1(2));
      },
      Execution::parallel);
  std::vector<std::vector<RunRecord>> records;
  for (const auto& r : runs) records.push_back(r.records);
  const auto mean = aggregate_expectation(records, Metric::ergodic_gap);

  // mean[i] is at N = i
  int violations = 0;
  double worst = 0.0;
  for (std::size_t i = 100; i + 1 < mean.size(); ++i) {
    const double rise = mean[i + 1].mean - mean[i].mean;
    const double allowed = 2.0 * std::max(mean[i].stderr_, mean[i + 1].stderr_);
    if (rise > allowed) ++violations;
    worst = std::max(worst, rise - allowed);
  }

  // bound constant for points of the simplices: (1/2) diam^2 + gamma0 c + e0
  // with diam^2 = 2 + 2, c <= ||K|| (2 + 2), e0 = sum gamma_n^2 (sigma_h^2 + sigma_l^2)
  double e0 = 0.0;
  for (long long n = 0; n < 10000000; ++n) e0 += sched(n) * sched(n) * 2.0 * var(n);
  const double bound = 0.5 * 4.0 + gamma0 * g.norm_k * 4.0 + e0;
  double weight = 0.0, scaled_max = 0.0;
  for (std::size_t i = 0; i < mean.size(); ++i) {
    weight += sched(static_cast<long long>(i));
    scaled_max = std::max(scaled_max, mean[i].mean * weight);
  }
  return {violations == 0 && scaled_max <= bound,
          std::to_string(violations) + " rises beyond 2 stderr after N = 100 (worst excess " + fmt(worst) +
              "); max gap(N) sum gamma = " + fmt(scaled_max) + " vs bound constant " + fmt(bound)};
}

// 5: pathwise inequalities on 10 problems x 3 schedules
Outcome lemma_suites() {
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<InclusionProblem> problems;
  for (int k = 0; k < 8; ++k) {
    const Index d = 3 + static_cast<Index>(unit(rng) * 18);
    problems.push_back(make_affine_inclusion(d, 0.2 + 1.8 * unit(rng), 0.5 + 5.0 * unit(rng), 1000 + k));
  }
  for (int k = 0; k < 2; ++k) {
    const Matrix d = random_matrix(rng, 30, 6);
    problems.push_back(make_lasso(d, random_vector(rng, 30), 0.05 + 0.1 * unit(rng)));
  }

  int runs = 0, failures = 0;
  std::size_t checked = 0;
  std::string first_failure;
  for (const auto& p : problems) {
    const double bound = kSqrt2MinusOne / p.mu;
    std::vector<StepSchedule> schedules{StepSchedule::constant(0.9 * bound), StepSchedule::band(0.8, 0.5 * bound)};
    schedules.push_back(p.A.modulus() > 0 ? StepSchedule::strongly_monotone(p.A.modulus())
                                          : StepSchedule::constant(0.3 * bound));
    for (const auto& s : schedules) {
      StochasticOracle o(p.B, NoiseModel::exact(), 0);
      LoopConfig cfg;
      cfg.schedule = s;
      cfg.budget = 300;
      cfg.keep_trajectory = true;
      const RunResult r = run(p, o, cfg, random_vector(rng, p.dim()));
      const Trajectory& t = *r.trajectory;
      ++runs;
      for (const auto& reports : {check_lemma_main(t, p, *p.known_zero), check_lemma_qes(t, p.B, p.mu),
                                   check_t_lower_bound(t, p.B, *p.known_zero, p.mu)}) {
        for (const auto& rep : reports) {
          if (!rep.applicable) continue;
          ++checked;
          if (!rep.pass) {
            ++failures;
            if (first_failure.empty()) {
              first_failure = "; first failure: " + p.name + " " + s.kind_name() + " n = " + std::to_string(rep.n) +
                              " slack " + fmt(rep.slack);
            }
          }
        }
      }
    }
  }

  // negative control: scalar recursion with x_5 shifted by 1
  const InclusionProblem scalar{"scalar", ResolvableOperator::zero(1), MonotoneMap::identity(1), {},
                                std::nullopt, std::nullopt, Vector::Zero(1), 1.0, 0.0};
  StochasticOracle so(scalar.B, NoiseModel::exact(), 0);
  LoopConfig sc;
  sc.schedule = StepSchedule::constant(0.4);
  sc.budget = 50;
  sc.keep_trajectory = true;
  Trajectory corrupted = *run(scalar, so, sc, Vector::Ones(1)).trajectory;
  corrupted.iterates[6](0) += 1.0;
  const bool control_fails = !all_pass(check_lemma_main(corrupted, scalar, Vector::Zero(1)));

  return {failures == 0 && control_fails,
          std::to_string(runs) + " runs, " + std::to_string(checked) + " applicable reports, " +
              std::to_string(failures) + " failures; corrupted control " + (control_fails ? "fails" : "PASSES") +
              first_failure};
}

// 6: Monte Carlo unbiasedness of every noise model
Outcome unbiasedness() {
  std::mt19937_64 rng(606);
  const Index d = 5;
  const Matrix g = random_matrix(rng, d, d);
  const auto b = MonotoneMap::affine(g - g.transpose(), Matrix::Identity(d, d), random_vector(rng, d));
  const InclusionProblem lasso = make_lasso(random_matrix(rng, 40, d), random_vector(rng, 40), 0.1);

  struct Case {
    std::string name;
    StochasticOracle oracle;
  };
  std::vector<Case> cases{
      {"gaussian constant", StochasticOracle(b, NoiseModel::gaussian(VarianceSchedule::constant(1.0)), 1)},
      {"gaussian power", StochasticOracle(b, NoiseModel::gaussian(VarianceSchedule::power(4.0, 1.0)), 2)},
      {"minibatch 1", StochasticOracle(lasso.B, NoiseModel::minibatch(lasso.components, 1), 3)},
      {"minibatch 8", StochasticOracle(lasso.B, NoiseModel::minibatch(lasso.components, 8), 4)}};

  const int draws = 100000;
  int failures = 0, checks = 0;
  double worst = 0.0;
  for (auto& c : cases) {
    for (int t = 0; t < 5; ++t) {
      const Vector y = random_vector(rng, d);
      const Vector target = c.oracle.base()(y);
      Vector sum = Vector::Zero(d), sum_sq = Vector::Zero(d);
      for (int k = 0; k < draws; ++k) {
        const Vector r = c.oracle.draw(3, y);
        sum += r;
        sum_sq += r.cwiseProduct(r);
      }
      const Vector mean = sum / draws;
      for (Index i = 0; i < d; ++i) {
        const double sd = std::sqrt(std::max(sum_sq(i) / draws - mean(i) * mean(i), 0.0));
        const double z = std::abs(mean(i) - target(i)) / (sd / std::sqrt(static_cast<double>(draws)));
        ++checks;
        worst = std::max(worst, z);
        if (std::abs(mean(i) - target(i)) > 4.0 * sd / std::sqrt(static_cast<double>(draws))) ++failures;
      }
    }
  }
  return {failures == 0, std::to_string(cases.size()) + " noise models, " + std::to_string(checks) +
                             " coordinates, " + std::to_string(failures) + " beyond 4 stderr (max " + fmt(worst) + ")"};
}

// 7: operator property suites, 200 random cases each
Outcome operator_properties() {
  std::mt19937_64 rng(707);
  const Index d = 6;
  int firm = 0, prox_ineq = 0, moreau = 0, adjoint = 0;

  Vector lo = random_vector(rng, d);
  Vector hi = lo + random_vector(rng, d).cwiseAbs();
  const std::vector<ProxFunction> prox{ProxFunction::zero(d),
                                       ProxFunction::l1(d, 0.4),
                                       ProxFunction::squared_l2(d, 1.3),
                                       ProxFunction::box_indicator(lo, hi),
                                       ProxFunction::ball_indicator(random_vector(rng, d), 0.8),
                                       ProxFunction::simplex_indicator(d),
                                       ProxFunction::origin_indicator(d)};
  std::vector<ResolvableOperator> resolvents{ResolvableOperator::zero(d), ResolvableOperator::scaled_identity(d, 0.7),
                                             ResolvableOperator::normal_cone_box(lo, hi),
                                             ResolvableOperator::normal_cone_ball(random_vector(rng, d), 1.5)};
  for (const auto& f : prox) resolvents.push_back(ResolvableOperator::subdifferential(f));

  for (const auto& op : resolvents) {
    for (int k = 0; k < 200; ++k) {
      const double gamma = std::exp(random_vector(rng, 1)(0));
      const Vector z1 = random_vector(rng, d, 3.0), z2 = random_vector(rng, d, 3.0);
      const Vector j1 = op.resolvent(gamma, z1), j2 = op.resolvent(gamma, z2);
      if ((j1 - j2).dot(z1 - z2) < (j1 - j2).squaredNorm() - 1e-10) ++firm;
    }
  }
  for (const auto& f : prox) {
    for (int k = 0; k < 200; ++k) {
      const Vector x = random_vector(rng, d, 3.0);
      const Vector y = f.prox(1.0, random_vector(rng, d, 3.0));
      const Vector p = f.prox(1.0, x);
      if (f.value(p) - f.value(y) > (y - p).dot(p - x) + 1e-10) ++prox_ineq;
      const double gamma = std::exp(random_vector(rng, 1)(0));
      const Vector rebuilt = prox_conjugate(f, gamma, x) + gamma * f.prox(1.0 / gamma, x / gamma);
      if ((rebuilt - x).cwiseAbs().maxCoeff() > 1e-12) ++moreau;
    }
  }
  const std::vector<LinearMap> maps{LinearMap::identity(d), LinearMap::zero(d, 4), LinearMap::dense(random_matrix(rng, 4, d)),
                                    LinearMap::dense(Matrix(pennies().transpose()))};
  for (const auto& k : maps) {
    for (int t = 0; t < 200; ++t) {
      const Vector x = random_vector(rng, k.domain_dim()), v = random_vector(rng, k.range_dim());
      const double lhs = k.apply(x).dot(v), rhs = x.dot(k.adjoint(v));
      if (std::abs(lhs - rhs) > 1e-10 * (1.0 + std::abs(lhs))) ++adjoint;
    }
  }
  return {firm + prox_ineq + moreau + adjoint == 0,
          "violations: firm nonexpansiveness " + std::to_string(firm) + "/" + std::to_string(200 * resolvents.size()) +
              ", prox inequality " + std::to_string(prox_ineq) + "/" + std::to_string(200 * prox.size()) +
              ", Moreau " + std::to_string(moreau) + "/" + std::to_string(200 * prox.size()) + ", adjoint " +
              std::to_string(adjoint) + "/" + std::to_string(200 * maps.size())};
}

// 8: exact stochastic steps equal deterministic reflected steps bitwise
Outcome equivalence() {
  std::mt19937_64 rng(808);
  int mismatches = 0, first_step = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Index d = 2 + static_cast<Index>(seed % 12);
    const auto p = make_affine_inclusion(d, 0.1 + 0.5 * static_cast<double>(seed % 4), 1.0 + static_cast<double>(seed % 7), 2000 + seed);
    const double gamma = 0.9 * kSqrt2MinusOne / p.mu;
    StochasticOracle o(p.B, NoiseModel::exact(), seed);
    const Vector x0 = random_vector(rng, d), xm = random_vector(rng, d);
    SolverState a = initial_state(x0, xm, o), b = initial_state(x0, xm, p.B);
    for (int k = 0; k < 50; ++k) {
      a = srfb_step(a, p.A, o, gamma);
      b = rfb_step(b, p.A, p.B, gamma);
    }
    if (a.x_curr != b.x_curr || a.x_prev != b.x_prev) ++mismatches;
    const SolverState s1 = srfb_step(initial_state(x0, x0, o), p.A, o, gamma);
    if (s1.x_curr != p.A.resolvent(gamma, x0 - gamma * p.B(x0))) ++first_step;
  }
  return {mismatches == 0 && first_step == 0, std::to_string(mismatches) + "/100 trajectories differ, " +
                                                  std::to_string(first_step) + "/100 first steps differ"};
}

// 9: every seed reaches resid < 1e-6 under summable variance
Outcome summable_noise_convergence() {
  const InclusionProblem p = dim20_instance();
  LoopConfig cfg;
  cfg.schedule = StepSchedule::constant(0.9 * kSqrt2MinusOne / p.mu);
  cfg.budget = 100000;
  cfg.stop_tolerance = 1e-6;
  const NoiseModel noise = NoiseModel::gaussian(VarianceSchedule::power(1.0, 2.0));
  const auto hits = run_seeds<long long>(
      seed_range(20),
      [&](std::uint64_t seed) {
        StochasticOracle o(p.B, noise, seed);
        const RunResult r = run(p, o, cfg, Vector::Zero(20));
        for (const auto& rec : r.records) {
          if (rec.resid < 1e-6) return rec.n;
        }
        return -1LL;
      },
      Execution::parallel);
  int reached = 0;
  long long latest = 0;
  for (long long h : hits) {
    if (h > 0) {
      ++reached;
      latest = std::max(latest, h);
    }
  }
  return {reached == 20, std::to_string(reached) + "/20 seeds reach resid < 1e-6; latest first hit at n = " +
                             std::to_string(latest)};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>>& criteria() {
  static const std::vector<std::pair<std::string, std::function<Outcome()>>> list{
      {"strongly monotone rate of E||x_n - x||^2", rate_strongly_monotone},
      {"deterministic convergence with constant step", deterministic_convergence},
      {"deterministic ergodic gap rate", ergodic_rate_deterministic},
      {"stochastic ergodic gap bound shape", ergodic_bound_stochastic},
      {"pathwise inequality suites", lemma_suites},
      {"oracle unbiasedness", unbiasedness},
      {"operator property suites", operator_properties},
      {"stochastic/deterministic equivalence", equivalence},
      {"convergence under summable variance", summable_noise_convergence}};
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "Run a single criterion (1-9)")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);

  bool all = true;
  const auto& list = criteria();
  for (std::size_t k = 0; k < list.size(); ++k) {
    if (only != 0 && static_cast<int>(k + 1) != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = list[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %zu %s: %s: %s [%.1fs]\n", k + 1, o.pass ? "PASS" : "FAIL", list[k].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
