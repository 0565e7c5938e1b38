// Serial vs OpenMP timing for the seed sweep and the seed aggregation kernels.
// Usage: srfb_bench [seeds] [iterations] [repeats]

#include "srfb/diagnostics.hpp"
#include "srfb/parallel.hpp"
#include "srfb/problems.hpp"
#include "srfb/solvers.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

using namespace srfb;

namespace {

template <typename Fn>
double best_ms(int repeats, Fn&& fn) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

std::vector<RunResult> sweep(const InclusionProblem& p, const std::vector<std::uint64_t>& seeds,
                             long long iterations, Execution exec) {
  LoopConfig lc;
  lc.kind = SolverKind::srfb;
  lc.schedule = StepSchedule::strongly_monotone(p.nu);
  lc.budget = iterations;
  return run_seeds<RunResult>(
      seeds,
      [&](std::uint64_t seed) {
        StochasticOracle o(p.B, NoiseModel::gaussian(VarianceSchedule::constant(1.0)), seed);
        return run(p, o, lc, Vector::Zero(p.dim()));
      },
      exec);
}

}  // namespace

int main(int argc, char** argv) {
  const int n_seeds = argc > 1 ? std::atoi(argv[1]) : 32;
  const long long iterations = argc > 2 ? std::atoll(argv[2]) : 20000;
  const int repeats = argc > 3 ? std::atoi(argv[3]) : 3;

  const InclusionProblem p = make_affine_inclusion(20, 1.0, 4.0, 7);
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(n_seeds));
  for (int i = 0; i < n_seeds; ++i) seeds[static_cast<std::size_t>(i)] = static_cast<std::uint64_t>(i);

  std::printf("threads %d, seeds %d, iterations %lld, best of %d\n", available_threads(), n_seeds,
              iterations, repeats);

  std::vector<RunResult> serial, parallel;
  const double t_serial = best_ms(repeats, [&] { serial = sweep(p, seeds, iterations, Execution::serial); });
  const double t_parallel =
      best_ms(repeats, [&] { parallel = sweep(p, seeds, iterations, Execution::parallel); });
  bool same = serial.size() == parallel.size();
  for (std::size_t i = 0; same && i < serial.size(); ++i) {
    same = serial[i].final_state.x_curr == parallel[i].final_state.x_curr;
  }
  std::printf("run_seeds   serial %10.2f ms   parallel %10.2f ms   speedup %5.2fx   identical %s\n",
              t_serial, t_parallel, t_serial / t_parallel, same ? "yes" : "NO");

  SeriesMatrix values(static_cast<std::size_t>(n_seeds));
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (const auto& r : serial[i].records) values[i].push_back(*r.dist_sq);
  }
  SeriesStats a, b;
  const double a_serial = best_ms(repeats * 10, [&] { a = aggregate(values, Execution::serial); });
  const double a_parallel = best_ms(repeats * 10, [&] { b = aggregate(values, Execution::parallel); });
  const bool agg_same = a.mean == b.mean && a.stderr_ == b.stderr_;
  std::printf("aggregate   serial %10.2f ms   parallel %10.2f ms   speedup %5.2fx   identical %s\n",
              a_serial, a_parallel, a_serial / a_parallel, agg_same ? "yes" : "NO");
  return same && agg_same ? 0 : 1;
}
