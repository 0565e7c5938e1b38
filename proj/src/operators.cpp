#include "srfb/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace srfb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasTol = 1e-12;

Vector soft_threshold(const Vector& x, double t) {
  return x.unaryExpr([t](double v) { return std::copysign(std::max(std::abs(v) - t, 0.0), v); });
}

}  // namespace

// ---------------------------------------------------------------------------
// MonotoneMap

MonotoneMap::MonotoneMap(Index dim, Eval eval, double lipschitz, double modulus)
    : dim_(dim),
      eval_(std::make_shared<const Eval>(std::move(eval))),
      lipschitz_(lipschitz),
      modulus_(modulus) {
  if (dim < 1) throw InvalidParameter("MonotoneMap: dimension must be >= 1");
  if (!(lipschitz >= 0.0)) throw InvalidParameter("MonotoneMap: Lipschitz constant must be >= 0");
  if (!(modulus >= 0.0)) throw InvalidParameter("MonotoneMap: modulus must be >= 0");
}

Vector MonotoneMap::operator()(const Vector& x) const {
  require_dim(x, dim_, "apply_map");
  require_finite(x, "apply_map");
  return (*eval_)(x);
}

MonotoneMap MonotoneMap::zero(Index dim) {
  return MonotoneMap(dim, [dim](const Vector&) { return Vector::Zero(dim).eval(); }, 0.0);
}

MonotoneMap MonotoneMap::identity(Index dim) {
  return MonotoneMap(dim, [](const Vector& x) { return x; }, 1.0, 1.0);
}

MonotoneMap MonotoneMap::affine(const Matrix& skew, const Matrix& psd, const Vector& shift) {
  const Index d = shift.size();
  if (skew.rows() != d || skew.cols() != d || psd.rows() != d || psd.cols() != d) {
    throw ContractViolation("affine map: matrix shapes do not match the shift dimension");
  }
  const double scale = 1.0 + skew.cwiseAbs().maxCoeff() + psd.cwiseAbs().maxCoeff();
  if ((skew + skew.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidParameter("affine map: skew part is not antisymmetric");
  }
  if ((psd - psd.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidParameter("affine map: psd part is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(psd, Eigen::EigenvaluesOnly);
  const double lambda_min = eig.eigenvalues().minCoeff();
  if (lambda_min < -1e-12 * scale) {
    throw InvalidParameter("affine map: psd part has a negative eigenvalue");
  }
  auto m = std::make_shared<const Matrix>(skew + psd);
  auto b = std::make_shared<const Vector>(shift);
  Eigen::JacobiSVD<Matrix> svd(*m);
  const double mu = svd.singularValues()(0);
  return MonotoneMap(
      d, [m, b](const Vector& x) { return Vector((*m) * x + *b); }, mu, std::max(lambda_min, 0.0));
}

MonotoneMap MonotoneMap::mean(std::vector<MonotoneMap> components, std::optional<double> lipschitz) {
  if (components.empty()) throw InvalidParameter("mean map: no components");
  const Index d = components.front().dim();
  double lip = 0.0;
  for (const auto& c : components) {
    if (c.dim() != d) throw ContractViolation("mean map: component dimensions differ");
    lip += c.lipschitz();
  }
  lip /= static_cast<double>(components.size());
  auto parts = std::make_shared<const std::vector<MonotoneMap>>(std::move(components));
  return MonotoneMap(
      d,
      [parts](const Vector& x) {
        Vector acc = Vector::Zero(x.size());
        for (const auto& c : *parts) acc += c(x);
        return Vector(acc / static_cast<double>(parts->size()));
      },
      lipschitz.value_or(lip));
}

// ---------------------------------------------------------------------------
// ProxFunction

ProxFunction::ProxFunction(std::string name, Index dim, Value value, Prox prox,
                           double strong_convexity, std::optional<double> domain_radius)
    : name_(std::move(name)),
      dim_(dim),
      value_(std::make_shared<const Value>(std::move(value))),
      prox_(std::make_shared<const Prox>(std::move(prox))),
      strong_convexity_(strong_convexity),
      domain_radius_(domain_radius) {
  if (dim < 1) throw InvalidParameter("ProxFunction: dimension must be >= 1");
}

double ProxFunction::value(const Vector& x) const {
  require_dim(x, dim_, "ProxFunction::value");
  return (*value_)(x);
}

Vector ProxFunction::prox(double t, const Vector& x) const {
  require_positive(t, "prox step");
  require_dim(x, dim_, "ProxFunction::prox");
  require_finite(x, "ProxFunction::prox");
  return (*prox_)(t, x);
}

ProxFunction ProxFunction::zero(Index dim) {
  return ProxFunction(
      "zero", dim, [](const Vector&) { return 0.0; }, [](double, const Vector& x) { return x; });
}

ProxFunction ProxFunction::l1(Index dim, double weight) {
  require_positive(weight, "l1 weight");
  return ProxFunction(
      "l1", dim, [weight](const Vector& x) { return weight * x.lpNorm<1>(); },
      [weight](double t, const Vector& x) { return soft_threshold(x, t * weight); });
}

ProxFunction ProxFunction::squared_l2(Index dim, double weight) {
  require_positive(weight, "squared_l2 weight");
  return ProxFunction(
      "squared_l2", dim, [weight](const Vector& x) { return 0.5 * weight * x.squaredNorm(); },
      [weight](double t, const Vector& x) { return Vector(x / (1.0 + t * weight)); }, weight);
}

ProxFunction ProxFunction::box_indicator(const Vector& lower, const Vector& upper) {
  if (lower.size() != upper.size()) throw ContractViolation("box: bound dimensions differ");
  if ((lower.array() > upper.array()).any()) throw InvalidParameter("box: lower > upper");
  auto lo = std::make_shared<const Vector>(lower);
  auto hi = std::make_shared<const Vector>(upper);
  const double radius = lower.cwiseAbs().cwiseMax(upper.cwiseAbs()).norm();
  return ProxFunction(
      "box", lower.size(),
      [lo, hi](const Vector& x) {
        const double tol = kFeasTol * (1.0 + x.cwiseAbs().maxCoeff());
        const bool inside = ((x - *lo).array() >= -tol).all() && ((*hi - x).array() >= -tol).all();
        return inside ? 0.0 : kInf;
      },
      [lo, hi](double, const Vector& x) { return Vector(x.cwiseMax(*lo).cwiseMin(*hi)); }, 0.0,
      radius);
}

ProxFunction ProxFunction::ball_indicator(const Vector& center, double radius) {
  if (!(radius >= 0.0)) throw InvalidParameter("ball: radius must be >= 0");
  auto c = std::make_shared<const Vector>(center);
  return ProxFunction(
      "ball", center.size(),
      [c, radius](const Vector& x) {
        return (x - *c).norm() <= radius * (1.0 + kFeasTol) + kFeasTol ? 0.0 : kInf;
      },
      [c, radius](double, const Vector& x) {
        const Vector diff = x - *c;
        const double dist = diff.norm();
        if (dist <= radius) return x;
        return Vector(*c + (radius / dist) * diff);
      },
      0.0, center.norm() + radius);
}

ProxFunction ProxFunction::simplex_indicator(Index dim) {
  return ProxFunction(
      "simplex", dim,
      [](const Vector& x) {
        const double tol = kFeasTol * static_cast<double>(x.size());
        const bool inside = (x.array() >= -tol).all() && std::abs(x.sum() - 1.0) <= tol;
        return inside ? 0.0 : kInf;
      },
      [](double, const Vector& x) { return project_simplex(x); }, 0.0, 1.0);
}

ProxFunction ProxFunction::origin_indicator(Index dim) {
  return ProxFunction(
      "origin", dim, [](const Vector& x) { return x.isZero(0.0) ? 0.0 : kInf; },
      [dim](double, const Vector&) { return Vector::Zero(dim).eval(); }, 0.0, 0.0);
}

Vector prox_conjugate(const ProxFunction& f, double gamma, const Vector& z) {
  require_positive(gamma, "prox_conjugate gamma");
  return z - gamma * f.prox(1.0 / gamma, z / gamma);
}

Vector project_simplex(const Vector& z) {
  const Index d = z.size();
  std::vector<Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&z](Index a, Index b) { return z(a) > z(b); });
  double cumsum = 0.0;
  double theta = 0.0;
  for (Index k = 0; k < d; ++k) {
    cumsum += z(order[static_cast<std::size_t>(k)]);
    const double candidate = (cumsum - 1.0) / static_cast<double>(k + 1);
    if (z(order[static_cast<std::size_t>(k)]) - candidate > 0.0) theta = candidate;
  }
  return (z.array() - theta).cwiseMax(0.0).matrix();
}

// ---------------------------------------------------------------------------
// ResolvableOperator

ResolvableOperator::ResolvableOperator(std::string name, Index dim, Resolvent resolvent,
                                       double modulus, std::optional<double> domain_bound)
    : name_(std::move(name)),
      dim_(dim),
      resolvent_(std::make_shared<const Resolvent>(std::move(resolvent))),
      modulus_(modulus),
      domain_bound_(domain_bound) {
  if (dim < 1) throw InvalidParameter("ResolvableOperator: dimension must be >= 1");
  if (!(modulus >= 0.0)) throw InvalidParameter("ResolvableOperator: modulus must be >= 0");
}

Vector ResolvableOperator::resolvent(double gamma, const Vector& z) const {
  require_positive(gamma, "resolvent gamma");
  require_dim(z, dim_, "resolvent");
  require_finite(z, "resolvent");
  return (*resolvent_)(gamma, z);
}

ResolvableOperator ResolvableOperator::zero(Index dim) {
  return ResolvableOperator("zero", dim, [](double, const Vector& z) { return z; });
}

ResolvableOperator ResolvableOperator::scaled_identity(Index dim, double nu) {
  if (!(nu >= 0.0)) throw InvalidParameter("scaled_identity: nu must be >= 0");
  return ResolvableOperator(
      "scaled_identity", dim,
      [nu](double gamma, const Vector& z) { return Vector(z / (1.0 + gamma * nu)); }, nu);
}

ResolvableOperator ResolvableOperator::subdifferential(const ProxFunction& f) {
  return ResolvableOperator(
      "subdiff_" + f.name(), f.dim(), [f](double gamma, const Vector& z) { return f.prox(gamma, z); },
      f.strong_convexity(), f.domain_radius());
}

ResolvableOperator ResolvableOperator::normal_cone_box(const Vector& lower, const Vector& upper) {
  ResolvableOperator op = subdifferential(ProxFunction::box_indicator(lower, upper));
  op.name_ = "normal_cone_box";
  return op;
}

ResolvableOperator ResolvableOperator::normal_cone_ball(const Vector& center, double radius) {
  ResolvableOperator op = subdifferential(ProxFunction::ball_indicator(center, radius));
  op.name_ = "normal_cone_ball";
  return op;
}

// ---------------------------------------------------------------------------
// LinearMap

LinearMap::LinearMap(Index domain_dim, Index range_dim, Apply apply, Apply adjoint,
                     std::optional<double> norm_hint)
    : domain_dim_(domain_dim),
      range_dim_(range_dim),
      apply_(std::make_shared<const Apply>(std::move(apply))),
      adjoint_(std::make_shared<const Apply>(std::move(adjoint))),
      norm_hint_(norm_hint) {}

Vector LinearMap::apply(const Vector& x) const {
  require_dim(x, domain_dim_, "LinearMap::apply");
  return (*apply_)(x);
}

Vector LinearMap::adjoint(const Vector& v) const {
  require_dim(v, range_dim_, "LinearMap::adjoint");
  return (*adjoint_)(v);
}

LinearMap LinearMap::dense(const Matrix& m, std::optional<double> norm_hint) {
  auto mat = std::make_shared<const Matrix>(m);
  return LinearMap(
      m.cols(), m.rows(), [mat](const Vector& x) { return Vector((*mat) * x); },
      [mat](const Vector& v) { return Vector(mat->transpose() * v); }, norm_hint);
}

LinearMap LinearMap::zero(Index domain_dim, Index range_dim) {
  return LinearMap(
      domain_dim, range_dim, [range_dim](const Vector&) { return Vector::Zero(range_dim).eval(); },
      [domain_dim](const Vector&) { return Vector::Zero(domain_dim).eval(); }, 0.0);
}

LinearMap LinearMap::identity(Index dim) {
  return LinearMap(
      dim, dim, [](const Vector& x) { return x; }, [](const Vector& v) { return v; }, 1.0);
}

double estimate_operator_norm(const LinearMap& k, double tol, int max_iter) {
  if (auto hint = k.norm_hint()) return *hint;
  require_positive(tol, "estimate_operator_norm tol");
  if (max_iter < 1) throw InvalidParameter("estimate_operator_norm: max_iter must be >= 1");

  std::mt19937_64 rng(0x5eedf00dULL);
  std::normal_distribution<double> normal;
  Vector v(k.domain_dim());
  for (Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
  v.normalize();

  double sigma = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const Vector w = k.adjoint(k.apply(v));
    const double wnorm = w.norm();
    if (wnorm == 0.0) return 0.0;
    const double next = std::sqrt(std::max(v.dot(w), 0.0));
    if (it > 0 && std::abs(next - sigma) <= tol * next) return next;
    sigma = next;
    v = w / wnorm;
  }
  throw NormEstimateError("estimate_operator_norm: no convergence within max_iter", sigma);
}

}  // namespace srfb
