#pragma once

// Pathwise inequality checks on recorded trajectories, log-log rate fits and
// Monte Carlo aggregation over seeds.

#include "srfb/operators.hpp"
#include "srfb/problems.hpp"
#include "srfb/records.hpp"

#include <string>
#include <utility>
#include <vector>

namespace srfb {

struct InequalityReport {
  long long n = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
  bool pass = false;   // slack >= -1e-10 (1 + |rhs|)
  /// False when the inequality is only claimed under a condition that does not
  /// hold at this n; such reports are informative, not assertions.
  bool applicable = true;
};

InequalityReport make_report(long long n, double lhs, double rhs, bool applicable = true);

/// True when every applicable report passes.
bool all_pass(const std::vector<InequalityReport>& reports);

/// Main one-step estimate for the monotone case, for n = 1 .. steps - 1:
///   ||x_{n+1}-x||^2 + (3 - g_n/g_{n-1})||x_{n+1}-x_n||^2 + (g_n/g_{n-1})||x_{n+1}-y_n||^2
///     + 2 g_n <r_n - Bx, x_{n+1}-x_n>
///   <= ||x_n-x||^2 + 2 g_n <r_{n-1}-Bx, x_n-x_{n-1}> + 2 g_n <r_{n-1}-r_n, x_{n+1}-y_n>
///     + (g_n/g_{n-1})||x_n-y_n||^2 + 2 g_n <r_n - By_n, x - y_n>
/// with r_n = B y_n recomputed from the stored iterates. Throws
/// InvalidParameter for trajectories produced with a noisy oracle.
std::vector<InequalityReport> check_lemma_main(const Trajectory& t, const InclusionProblem& p,
                                               const Vector& x_ref);

/// For n = 0 .. steps - 1, with y_{-1} = x_0:
///   2<By_{n-1} - By_n, x_{n+1} - y_n>
///   <= mu(1+sqrt2)||y_n - x_n||^2 + mu||x_n - y_{n-1}||^2 + mu sqrt2 ||y_n - x_{n+1}||^2
std::vector<InequalityReport> check_lemma_qes(const Trajectory& t, const MonotoneMap& b, double mu);

/// For n = 0 .. steps - 1:
///   T_n = (1/g_n)||x_n-x||^2 + mu||x_n-y_{n-1}||^2 + (1/g_{n-1} + mu(1+sqrt2))||x_n-x_{n-1}||^2
///         + 2<By_{n-1} - Bx, x_n - x_{n-1}>  >=  ||x_n - x||^2 / (2 g_n).
/// A report is applicable only where 1/(2 g_n) >= mu.
std::vector<InequalityReport> check_t_lower_bound(const Trajectory& t, const MonotoneMap& b,
                                                  const Vector& x_ref, double mu);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
};

/// Least-squares slope of log(value) against log(n) over n in [lo, hi].
/// Throws InvalidParameter listing the offending indices when a value in the
/// window is not positive, or when fewer than two points fall in the window.
RateFit fit_rate(const std::vector<std::pair<double, double>>& series, double lo, double hi);

enum class Metric { dist_sq, resid, draw_err_sq, ergodic_gap };
std::string to_string(Metric m);
Metric metric_from_string(const std::string& name);

struct MeanPoint {
  long long n = 0;
  double mean = 0.0;
  double stderr_ = 0.0;  // sample std / sqrt(#seeds)
};

/// Pointwise mean and standard error over seeds. Requires >= 2 seeds, identical
/// n grids and the metric present in every record.
std::vector<MeanPoint> aggregate_expectation(const std::vector<std::vector<RunRecord>>& runs,
                                             Metric metric);

/// Extracts one metric as (n, value) pairs; throws if any record lacks it.
std::vector<std::pair<double, double>> metric_series(const std::vector<RunRecord>& records,
                                                     Metric metric);

}  // namespace srfb
