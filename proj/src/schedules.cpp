#include "srfb/schedules.hpp"

#include "srfb/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace srfb {

StepSchedule StepSchedule::constant(double gamma) {
  require_positive(gamma, "constant schedule gamma");
  return StepSchedule(ScheduleKind::constant, gamma, 1.0, 0.0, 0.0);
}

StepSchedule StepSchedule::band(double c, double gamma) {
  require_positive(gamma, "band schedule gamma");
  if (!(c > 0.0 && c <= 1.0)) throw InvalidParameter("band schedule: c must lie in (0, 1]");
  return StepSchedule(ScheduleKind::band, gamma, c, 0.0, 0.0);
}

StepSchedule StepSchedule::strongly_monotone(double nu) {
  require_positive(nu, "strongly monotone schedule nu");
  return StepSchedule(ScheduleKind::strongly_monotone, 1.0 / (2.0 * nu), 1.0, nu, 1.0);
}

StepSchedule StepSchedule::power(double gamma0, double p) {
  require_positive(gamma0, "power schedule gamma0");
  if (!(p >= 0.0)) throw InvalidParameter("power schedule: exponent must be >= 0");
  return StepSchedule(ScheduleKind::power, gamma0, 1.0, 0.0, p);
}

double StepSchedule::operator()(long long n) const {
  if (n < -1) throw InvalidParameter("step schedule evaluated at n < -1");
  const double m = static_cast<double>(std::max(n, 0LL)) + 1.0;
  switch (kind_) {
    case ScheduleKind::constant:
      return gamma_;
    case ScheduleKind::band:
      return gamma_ * (1.0 - (1.0 - c_) / m);
    case ScheduleKind::strongly_monotone:
      return 1.0 / (2.0 * nu_ * m);
    case ScheduleKind::power:
      return gamma_ / std::pow(m, p_);
  }
  return gamma_;
}

std::string StepSchedule::kind_name() const {
  switch (kind_) {
    case ScheduleKind::constant:
      return "constant";
    case ScheduleKind::band:
      return "band";
    case ScheduleKind::strongly_monotone:
      return "strongly_monotone";
    case ScheduleKind::power:
      return "power";
  }
  return "unknown";
}

double StepSchedule::sup() const {
  // band approaches gamma from below, all others peak at n = 0
  return kind_ == ScheduleKind::band ? gamma_ : (*this)(0);
}

bool StepSchedule::nonincreasing() const {
  return kind_ != ScheduleKind::band || c_ == 1.0;
}

bool StepSchedule::nondecreasing() const {
  switch (kind_) {
    case ScheduleKind::constant:
    case ScheduleKind::band:
      return true;
    case ScheduleKind::strongly_monotone:
      return false;
    case ScheduleKind::power:
      return p_ == 0.0;
  }
  return false;
}

bool StepSchedule::strictly_decreasing() const {
  return kind_ == ScheduleKind::strongly_monotone || (kind_ == ScheduleKind::power && p_ > 0.0);
}

double StepSchedule::decay_order() const {
  switch (kind_) {
    case ScheduleKind::constant:
    case ScheduleKind::band:
      return 0.0;
    case ScheduleKind::strongly_monotone:
      return 1.0;
    case ScheduleKind::power:
      return p_;
  }
  return 0.0;
}

double tau(const StepSchedule& s, double mu, long long /*horizon*/) {
  if (!(mu >= 0.0)) throw InvalidParameter("tau: mu must be >= 0");
  const double penalty = mu * kOnePlusSqrt2;
  switch (s.kind()) {
    case ScheduleKind::constant:
      return 1.0 / s.param_gamma() - penalty;
    case ScheduleKind::band:
      return 2.0 / s.param_gamma() - 1.0 / (s.param_c() * s.param_gamma()) - penalty;
    case ScheduleKind::strongly_monotone:
      // n = 0 gives 4 nu - 2 nu; n >= 1 gives 2 nu (n + 2)
      return 2.0 * s.param_nu() - penalty;
    case ScheduleKind::power:
      // 2 (n+1)^p - n^p is increasing for p >= 0, minimum at n = 0
      return 1.0 / s.param_gamma() - penalty;
  }
  return 0.0;
}

double tau_over_horizon(const StepSchedule& s, double mu, long long horizon) {
  if (horizon < 0) throw InvalidParameter("tau_over_horizon: horizon must be >= 0");
  double best = std::numeric_limits<double>::infinity();
  for (long long n = 0; n <= horizon; ++n) {
    best = std::min(best, 2.0 / s(n) - 1.0 / s(n - 1) - mu * kOnePlusSqrt2);
  }
  return best;
}

bool strictly_below(double a, double b) {
  return a < b && !(std::abs(b - a) <= kBoundaryRelTol * std::abs(b));
}

bool tau_positive(const StepSchedule& s, double mu) {
  const double t = tau(s, mu);
  const double scale = 2.0 / s.sup() + mu * kOnePlusSqrt2;
  return t > kBoundaryRelTol * scale;
}

double strongly_monotone_gamma(double nu, long long n) {
  require_positive(nu, "strongly_monotone_gamma nu");
  if (n < 0) throw InvalidParameter("strongly_monotone_gamma: n must be >= 0");
  return 1.0 / (2.0 * nu * (static_cast<double>(n) + 1.0));
}

long long burn_in_n0(double nu, double mu) {
  require_positive(nu, "burn_in_n0 nu");
  if (!(mu >= 0.0)) throw InvalidParameter("burn_in_n0: mu must be >= 0");
  return static_cast<long long>(std::floor(4.0 * mu * kOnePlusSqrt2 / nu)) + 1;
}

PdScheduleReport validate_pd_schedule(const StepSchedule& s, double mu_h, double mu_l,
                                      double norm_k) {
  if (!(mu_h >= 0.0 && mu_l >= 0.0 && norm_k >= 0.0)) {
    throw InvalidParameter("validate_pd_schedule: constants must be >= 0");
  }
  PdScheduleReport r;
  r.mu = 2.0 * std::max(mu_h, mu_l) + norm_k;
  r.bound = r.mu > 0.0 ? 1.0 / (2.0 * r.mu) : std::numeric_limits<double>::infinity();
  r.nonincreasing = s.nonincreasing();
  r.below_bound = strictly_below(s.sup(), r.bound);
  r.pass = r.nonincreasing && r.below_bound;
  std::ostringstream why;
  if (!r.nonincreasing) why << "schedule is not nonincreasing; ";
  if (!r.below_bound) why << "sup gamma = " << s.sup() << " is not below 1/(2 mu) = " << r.bound;
  r.reason = r.pass ? "ok" : why.str();
  return r;
}

}  // namespace srfb
