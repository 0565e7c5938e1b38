#pragma once

// Step-size sequences and the scalar tests attached to them.
//
// Every schedule is evaluated at n >= -1. The value at n = -1 is defined as
// gamma_0, which is what the tau condition needs for its first term.

#include <optional>
#include <string>

namespace srfb {

enum class ScheduleKind { constant, band, strongly_monotone, power };

class StepSchedule {
 public:
  /// gamma_n = gamma.
  static StepSchedule constant(double gamma);
  /// Ramp inside [c gamma, gamma]: gamma_n = gamma (1 - (1 - c)/(n + 1)).
  /// Starts at c gamma and increases towards gamma. Requires 0 < c <= 1.
  static StepSchedule band(double c, double gamma);
  /// gamma_n = 1/(2 nu (n + 1)).
  static StepSchedule strongly_monotone(double nu);
  /// gamma_n = gamma0 / (n + 1)^p with p >= 0.
  static StepSchedule power(double gamma0, double p);

  double operator()(long long n) const;

  ScheduleKind kind() const noexcept { return kind_; }
  std::string kind_name() const;
  double param_gamma() const noexcept { return gamma_; }
  double param_c() const noexcept { return c_; }
  double param_nu() const noexcept { return nu_; }
  double param_p() const noexcept { return p_; }

  /// sup_n gamma_n.
  double sup() const;
  bool nonincreasing() const;
  bool nondecreasing() const;
  bool strictly_decreasing() const;
  /// Exponent p with gamma_n ~ n^-p (0 for schedules bounded away from 0).
  double decay_order() const;

 private:
  StepSchedule(ScheduleKind kind, double gamma, double c, double nu, double p)
      : kind_(kind), gamma_(gamma), c_(c), nu_(nu), p_(p) {}

  ScheduleKind kind_;
  double gamma_;
  double c_;
  double nu_;
  double p_;
};

/// 1 + sqrt 2.
inline constexpr double kOnePlusSqrt2 = 2.41421356237309504880;
/// sqrt 2 - 1.
inline constexpr double kSqrt2MinusOne = 0.41421356237309504880;

/// Relative tolerance used when a strict inequality sits on a rounding boundary.
inline constexpr double kBoundaryRelTol = 1e-12;

/// inf_n (2/gamma_n - 1/gamma_{n-1} - mu (1 + sqrt 2)).
///
/// Every shipped kind has a closed-form infimum over all n >= 0, which is
/// returned; `horizon` is accepted for interface symmetry and ignored. For a
/// band the value is the worst case over any sequence in [c gamma, gamma],
/// 2/gamma - 1/(c gamma) - mu (1 + sqrt 2), not only the ramp evaluator.
double tau(const StepSchedule& s, double mu, long long horizon = 1);

/// Same quantity by direct scan of the evaluator over n in [0, horizon].
double tau_over_horizon(const StepSchedule& s, double mu, long long horizon);

/// tau(s, mu) > 0, treating values within kBoundaryRelTol of zero as zero.
bool tau_positive(const StepSchedule& s, double mu);

/// 1/(2 nu (n + 1)).
double strongly_monotone_gamma(double nu, long long n);

/// Smallest integer n0 with n0 > 4 mu (1 + sqrt 2) / nu.
long long burn_in_n0(double nu, double mu);

struct PdScheduleReport {
  bool pass = false;
  double mu = 0.0;
  double bound = 0.0;  // 1/(2 mu), +inf when mu = 0
  bool nonincreasing = false;
  bool below_bound = false;
  std::string reason;
};

/// Passes iff the schedule is nonincreasing and sup gamma_n < 1/(2 mu) with
/// mu = 2 max(mu_h, mu_l) + norm_k.
PdScheduleReport validate_pd_schedule(const StepSchedule& s, double mu_h, double mu_l,
                                      double norm_k);

/// Strict "a < b" that treats |a - b| <= kBoundaryRelTol * |b| as equality.
bool strictly_below(double a, double b);

}  // namespace srfb
