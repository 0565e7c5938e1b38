#pragma once

// Operator catalog: single-valued monotone Lipschitz maps, operators accessed
// through their resolvents, proximable functions and bounded linear maps.
// Every instance is immutable after construction and safe to share between
// concurrently executing runs.

#include "srfb/types.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace srfb {

/// Monotone, Lipschitz single-valued map B on R^d.
///
/// `lipschitz()` is the declared constant mu and `modulus()` the declared
/// strong-monotonicity modulus nu_B (0 when B is merely monotone).
class MonotoneMap {
 public:
  using Eval = std::function<Vector(const Vector&)>;

  MonotoneMap(Index dim, Eval eval, double lipschitz, double modulus = 0.0);

  /// B(x). Throws ContractViolation on dimension mismatch or non-finite input.
  Vector operator()(const Vector& x) const;

  Index dim() const noexcept { return dim_; }
  double lipschitz() const noexcept { return lipschitz_; }
  double modulus() const noexcept { return modulus_; }

  static MonotoneMap zero(Index dim);
  static MonotoneMap identity(Index dim);
  /// x -> (skew + psd) x + shift. `skew` must be antisymmetric and `psd`
  /// symmetric positive semidefinite; mu and nu_B are computed exactly.
  static MonotoneMap affine(const Matrix& skew, const Matrix& psd, const Vector& shift);
  /// Mean of the components. The declared Lipschitz constant is the mean of
  /// the component constants unless `lipschitz` is given.
  static MonotoneMap mean(std::vector<MonotoneMap> components,
                          std::optional<double> lipschitz = std::nullopt);

 private:
  Index dim_;
  std::shared_ptr<const Eval> eval_;
  double lipschitz_;
  double modulus_;
};

/// Free-function form of B(x).
inline Vector apply_map(const MonotoneMap& b, const Vector& x) { return b(x); }

/// Proper lsc convex function with a computable proximity operator.
///
/// `prox(t, x)` returns prox_{t f}(x). `value` may return +infinity outside
/// dom f. Indicator functions test membership with a relative tolerance of
/// 1e-12 so that projections which are feasible up to rounding count as
/// feasible.
class ProxFunction {
 public:
  using Value = std::function<double(const Vector&)>;
  using Prox = std::function<Vector(double, const Vector&)>;

  ProxFunction(std::string name, Index dim, Value value, Prox prox, double strong_convexity = 0.0,
               std::optional<double> domain_radius = std::nullopt);

  double value(const Vector& x) const;
  Vector prox(double t, const Vector& x) const;

  const std::string& name() const noexcept { return name_; }
  Index dim() const noexcept { return dim_; }
  double strong_convexity() const noexcept { return strong_convexity_; }
  /// Radius of a ball centred at the origin containing dom f, when bounded.
  std::optional<double> domain_radius() const noexcept { return domain_radius_; }

  static ProxFunction zero(Index dim);
  static ProxFunction l1(Index dim, double weight);
  static ProxFunction squared_l2(Index dim, double weight);
  static ProxFunction box_indicator(const Vector& lower, const Vector& upper);
  static ProxFunction ball_indicator(const Vector& center, double radius);
  static ProxFunction simplex_indicator(Index dim);
  /// Indicator of {0}; its conjugate is identically zero.
  static ProxFunction origin_indicator(Index dim);

 private:
  std::string name_;
  Index dim_;
  std::shared_ptr<const Value> value_;
  std::shared_ptr<const Prox> prox_;
  double strong_convexity_;
  std::optional<double> domain_radius_;
};

/// prox_{gamma f*}(z) through the Moreau decomposition
/// z = prox_{gamma f*}(z) + gamma prox_{f/gamma}(z/gamma).
Vector prox_conjugate(const ProxFunction& f, double gamma, const Vector& z);

/// Euclidean projection onto the probability simplex. Sort-based; ties are
/// broken by index order (stable sort), so the output is reproducible.
Vector project_simplex(const Vector& z);

/// Maximal monotone operator A accessed through J_{gamma A} = (Id + gamma A)^{-1}.
class ResolvableOperator {
 public:
  using Resolvent = std::function<Vector(double, const Vector&)>;

  ResolvableOperator(std::string name, Index dim, Resolvent resolvent, double modulus = 0.0,
                     std::optional<double> domain_bound = std::nullopt);

  /// J_{gamma A}(z). Throws InvalidParameter when gamma <= 0.
  Vector resolvent(double gamma, const Vector& z) const;

  const std::string& name() const noexcept { return name_; }
  Index dim() const noexcept { return dim_; }
  /// Strong-monotonicity modulus nu_A (0 when A is merely monotone).
  double modulus() const noexcept { return modulus_; }
  /// Radius R of a ball containing dom A, when dom A is bounded.
  std::optional<double> domain_bound() const noexcept { return domain_bound_; }

  static ResolvableOperator zero(Index dim);
  /// A = nu Id, with J_{gamma A}(z) = z / (1 + gamma nu).
  static ResolvableOperator scaled_identity(Index dim, double nu);
  /// A = subdifferential of f, so J_{gamma A} = prox_{gamma f}.
  static ResolvableOperator subdifferential(const ProxFunction& f);
  static ResolvableOperator normal_cone_box(const Vector& lower, const Vector& upper);
  static ResolvableOperator normal_cone_ball(const Vector& center, double radius);

 private:
  std::string name_;
  Index dim_;
  std::shared_ptr<const Resolvent> resolvent_;
  double modulus_;
  std::optional<double> domain_bound_;
};

inline Vector resolvent(const ResolvableOperator& a, double gamma, const Vector& z) {
  return a.resolvent(gamma, z);
}

/// Bounded linear map K: R^n -> R^m together with its adjoint.
class LinearMap {
 public:
  using Apply = std::function<Vector(const Vector&)>;

  LinearMap(Index domain_dim, Index range_dim, Apply apply, Apply adjoint,
            std::optional<double> norm_hint = std::nullopt);

  Vector apply(const Vector& x) const;
  Vector adjoint(const Vector& v) const;

  Index domain_dim() const noexcept { return domain_dim_; }
  Index range_dim() const noexcept { return range_dim_; }
  std::optional<double> norm_hint() const noexcept { return norm_hint_; }

  static LinearMap dense(const Matrix& m, std::optional<double> norm_hint = std::nullopt);
  static LinearMap zero(Index domain_dim, Index range_dim);
  static LinearMap identity(Index dim);

 private:
  Index domain_dim_;
  Index range_dim_;
  std::shared_ptr<const Apply> apply_;
  std::shared_ptr<const Apply> adjoint_;
  std::optional<double> norm_hint_;
};

/// Power iteration did not settle; carries the last estimate.
class NormEstimateError : public NumericalError {
 public:
  NormEstimateError(const std::string& what, double best) : NumericalError(what), best_(best) {}
  double best_estimate() const noexcept { return best_; }

 private:
  double best_;
};

/// ||K|| by power iteration on K*K (Rayleigh quotient), started from a fixed
/// pseudo-random unit vector. Returns the norm hint unchanged when K has one.
double estimate_operator_norm(const LinearMap& k, double tol = 1e-12, int max_iter = 100000);

}  // namespace srfb
