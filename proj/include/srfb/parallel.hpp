#pragma once

// OpenMP kernels for seed sweeps and their serial reference versions. Both
// paths perform the same floating-point operations in the same order per
// output element, so their results are bitwise identical.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace srfb {

enum class Execution { serial, parallel };

/// Calls body(i) for i in [0, count). In parallel mode iterations are spread
/// over OpenMP threads; the first exception (lowest i) is rethrown after all
/// iterations finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, Execution exec);

/// Runs fn(seed) for every seed; results keep the seed order.
template <typename Result, typename Fn>
std::vector<Result> run_seeds(const std::vector<std::uint64_t>& seeds, Fn&& fn, Execution exec) {
  std::vector<Result> out(seeds.size());
  parallel_for(
      seeds.size(), [&](std::size_t i) { out[i] = fn(seeds[i]); }, exec);
  return out;
}

using SeriesMatrix = std::vector<std::vector<double>>;  // [seed][point]

struct SeriesStats {
  std::vector<double> mean;
  std::vector<double> stderr_;  // sample standard deviation / sqrt(#seeds)
};

/// Column-wise mean and standard error. Requires >= 2 rows of equal length.
SeriesStats aggregate(const SeriesMatrix& values, Execution exec);

/// Number of threads an OpenMP parallel region would use.
int available_threads();

}  // namespace srfb
