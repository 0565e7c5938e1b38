#include "srfb/diagnostics.hpp"

#include "srfb/parallel.hpp"
#include "srfb/schedules.hpp"

#include <cmath>
#include <sstream>

namespace srfb {

namespace {

double metric_value(const RunRecord& r, Metric m) {
  std::optional<double> v;
  switch (m) {
    case Metric::dist_sq:
      v = r.dist_sq;
      break;
    case Metric::resid:
      v = r.resid;
      break;
    case Metric::draw_err_sq:
      v = r.draw_err_sq;
      break;
    case Metric::ergodic_gap:
      v = r.ergodic_gap;
      break;
  }
  if (!v) {
    throw InvalidParameter("record n = " + std::to_string(r.n) + " has no " + to_string(m));
  }
  return *v;
}

}  // namespace

InequalityReport make_report(long long n, double lhs, double rhs, bool applicable) {
  InequalityReport r;
  r.n = n;
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.pass = r.slack >= -1e-10 * (1.0 + std::abs(rhs));
  r.applicable = applicable;
  return r;
}

bool all_pass(const std::vector<InequalityReport>& reports) {
  for (const auto& r : reports) {
    if (r.applicable && !r.pass) return false;
  }
  return true;
}

std::vector<InequalityReport> check_lemma_main(const Trajectory& t, const InclusionProblem& p,
                                               const Vector& x_ref) {
  if (!t.exact_oracle) {
    throw InvalidParameter("check_lemma_main refuses trajectories produced with a noisy oracle");
  }
  const MonotoneMap& b = p.B;
  const Vector bx = b(x_ref);
  std::vector<InequalityReport> out;
  for (long long n = 1; n + 1 <= t.steps(); ++n) {
    const Vector& xn1 = t.x(n + 1);
    const Vector& xn = t.x(n);
    const Vector& xm = t.x(n - 1);
    const Vector yn = t.y(n);
    const Vector rn = b(yn);
    const Vector rm = b(t.y(n - 1));
    const double g = t.gamma(n);
    const double ratio = g / t.gamma(n - 1);

    const double lhs = (xn1 - x_ref).squaredNorm() + (3.0 - ratio) * (xn1 - xn).squaredNorm() +
                       ratio * (xn1 - yn).squaredNorm() + 2.0 * g * (rn - bx).dot(xn1 - xn);
    const double rhs = (xn - x_ref).squaredNorm() + 2.0 * g * (rm - bx).dot(xn - xm) +
                       2.0 * g * (rm - rn).dot(xn1 - yn) + ratio * (xn - yn).squaredNorm() +
                       2.0 * g * (rn - b(yn)).dot(x_ref - yn);
    out.push_back(make_report(n, lhs, rhs));
  }
  return out;
}

std::vector<InequalityReport> check_lemma_qes(const Trajectory& t, const MonotoneMap& b, double mu) {
  std::vector<InequalityReport> out;
  for (long long n = 0; n + 1 <= t.steps(); ++n) {
    const Vector& xn1 = t.x(n + 1);
    const Vector& xn = t.x(n);
    const Vector yn = t.y(n);
    const Vector ym = t.y(n - 1);
    const double lhs = 2.0 * (b(ym) - b(yn)).dot(xn1 - yn);
    const double rhs = mu * kOnePlusSqrt2 * (yn - xn).squaredNorm() + mu * (xn - ym).squaredNorm() +
                       mu * std::sqrt(2.0) * (yn - xn1).squaredNorm();
    out.push_back(make_report(n, lhs, rhs));
  }
  return out;
}

std::vector<InequalityReport> check_t_lower_bound(const Trajectory& t, const MonotoneMap& b,
                                                  const Vector& x_ref, double mu) {
  const Vector bx = b(x_ref);
  std::vector<InequalityReport> out;
  for (long long n = 0; n + 1 <= t.steps(); ++n) {
    const Vector& xn = t.x(n);
    const Vector& xm = t.x(n - 1);
    const Vector ym = t.y(n - 1);
    const double g = t.gamma(n);
    const double gm = t.gamma(n - 1);
    const double dist = (xn - x_ref).squaredNorm();
    const double tn = dist / g + mu * (xn - ym).squaredNorm() +
                      (1.0 / gm + mu * kOnePlusSqrt2) * (xn - xm).squaredNorm() +
                      2.0 * (b(ym) - bx).dot(xn - xm);
    out.push_back(make_report(n, dist / (2.0 * g), tn, 1.0 / (2.0 * g) >= mu));
  }
  return out;
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& series, double lo, double hi) {
  if (!(lo <= hi)) throw InvalidParameter("fit_rate: empty window");
  std::vector<std::size_t> bad;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto [n, v] = series[i];
    if (n < lo || n > hi) continue;
    if (!(v > 0.0) || !std::isfinite(v) || !(n > 0.0)) {
      bad.push_back(i);
      continue;
    }
    const double lx = std::log(n);
    const double ly = std::log(v);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++k;
  }
  if (!bad.empty()) {
    std::ostringstream os;
    os << "fit_rate: nonpositive values at indices";
    for (std::size_t i : bad) os << ' ' << i;
    throw InvalidParameter(os.str());
  }
  if (k < 2) throw InvalidParameter("fit_rate: fewer than two points in the window");
  const double kk = static_cast<double>(k);
  const double denom = kk * sxx - sx * sx;
  if (denom == 0.0) throw InvalidParameter("fit_rate: all points share one n");
  RateFit fit;
  fit.slope = (kk * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / kk;
  fit.points = k;
  return fit;
}

std::string to_string(Metric m) {
  switch (m) {
    case Metric::dist_sq:
      return "dist_sq";
    case Metric::resid:
      return "resid";
    case Metric::draw_err_sq:
      return "draw_err_sq";
    case Metric::ergodic_gap:
      return "ergodic_gap";
  }
  return "unknown";
}

Metric metric_from_string(const std::string& name) {
  if (name == "dist_sq") return Metric::dist_sq;
  if (name == "resid") return Metric::resid;
  if (name == "draw_err_sq") return Metric::draw_err_sq;
  if (name == "ergodic_gap") return Metric::ergodic_gap;
  throw InvalidParameter("unknown metric '" + name + "'");
}

std::vector<std::pair<double, double>> metric_series(const std::vector<RunRecord>& records,
                                                     Metric metric) {
  std::vector<std::pair<double, double>> out;
  out.reserve(records.size());
  for (const auto& r : records) out.emplace_back(static_cast<double>(r.n), metric_value(r, metric));
  return out;
}

std::vector<MeanPoint> aggregate_expectation(const std::vector<std::vector<RunRecord>>& runs,
                                             Metric metric) {
  if (runs.size() < 2) throw InvalidParameter("aggregate_expectation: needs at least two seeds");
  const std::size_t len = runs.front().size();
  SeriesMatrix values(runs.size(), std::vector<double>(len));
  for (std::size_t s = 0; s < runs.size(); ++s) {
    if (runs[s].size() != len) throw InvalidParameter("aggregate_expectation: misaligned grids");
    for (std::size_t i = 0; i < len; ++i) {
      if (runs[s][i].n != runs.front()[i].n) {
        throw InvalidParameter("aggregate_expectation: misaligned grids");
      }
      values[s][i] = metric_value(runs[s][i], metric);
    }
  }
  const auto stats = aggregate(values, Execution::serial);
  std::vector<MeanPoint> out(len);
  for (std::size_t i = 0; i < len; ++i) {
    out[i] = {runs.front()[i].n, stats.mean[i], stats.stderr_[i]};
  }
  return out;
}

}  // namespace srfb
