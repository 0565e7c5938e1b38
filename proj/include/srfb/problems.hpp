#pragma once

// Benchmark problems with known or independently computed solutions.

#include "srfb/operators.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace srfb {

/// Convex differentiable function with Lipschitz gradient.
struct SmoothFunction {
  std::function<double(const Vector&)> value;
  MonotoneMap gradient;

  double lipschitz() const noexcept { return gradient.lipschitz(); }
  static SmoothFunction zero(Index dim);
  static SmoothFunction squared_norm(Index dim, double beta);
};

/// 0 in (A + B)x.
struct InclusionProblem {
  std::string name;
  ResolvableOperator A;
  MonotoneMap B;
  /// Finite-sum decomposition of B (mean of components), when there is one.
  std::vector<MonotoneMap> components;
  /// Composite form: A = subdifferential of f, B = gradient of h.
  std::optional<ProxFunction> f;
  std::optional<SmoothFunction> h;
  std::optional<Vector> known_zero;
  double mu = 0.0;
  double nu = 0.0;

  Index dim() const noexcept { return B.dim(); }
  /// ||x - J_{gamma A}(x - gamma B x)||.
  double fixed_point_residual(const Vector& x, double gamma) const;
};

/// A = nu Id and B x = S x + b with S = skew_scale (G - G^T)/||G - G^T||, where
/// G and b have standard normal entries drawn from `seed`. mu = ||S||.
InclusionProblem make_affine_inclusion(Index dim, double nu, double skew_scale, std::uint64_t seed);

/// Same family with explicit skew matrix and shift. Throws NumericalError when
/// nu Id + S is singular.
InclusionProblem make_affine_inclusion(double nu, const Matrix& skew, const Vector& shift);

/// minimize lambda ||x||_1 + (1/m) sum_i (1/2)(a_i . x - t_i)^2.
/// The reference minimizer comes from cyclic coordinate descent followed by a
/// Newton polish on the detected support.
InclusionProblem make_lasso(const Matrix& design, const Vector& targets, double lambda);

/// Reference lasso minimizer (exposed for tests).
Vector lasso_reference_solution(const Matrix& design, const Vector& targets, double lambda);

enum class SaddleKind { bilinear_simplex, smoothed_simplex, generic };

/// min_x max_v G(x, v) = h(x) + f(x) + <Kx, v> - g*(v) - l(v).
struct SaddleProblem {
  std::string name;
  ProxFunction f;
  ProxFunction gstar;
  LinearMap K;
  SmoothFunction h;
  SmoothFunction l;
  std::optional<std::pair<Vector, Vector>> known_saddle;
  SaddleKind kind = SaddleKind::generic;
  Matrix payoff;  // set for the simplex kinds
  double beta = 0.0;
  double norm_k = 0.0;

  Index primal_dim() const noexcept { return K.domain_dim(); }
  Index dual_dim() const noexcept { return K.range_dim(); }
  double mu_h() const noexcept { return h.lipschitz(); }
  double mu_l() const noexcept { return l.lipschitz(); }
};

/// Zero-sum game: x (rows) minimizes x^T M v, v (columns) maximizes; both live
/// on probability simplices, K = M^T. An equilibrium is found by support
/// enumeration when the game is small enough.
SaddleProblem make_matrix_game(const Matrix& payoff);

/// Matrix game with l(v) = (beta/2)||v||^2 subtracted from the payoff.
SaddleProblem make_smoothed_saddle(const Matrix& payoff, double beta);

/// Equilibrium of x^T M v by enumerating equal-size supports. Returns nullopt
/// when none is found (degenerate games) or the game has more than
/// `max_dim` strategies on either side.
std::optional<std::pair<Vector, Vector>> game_equilibrium(const Matrix& payoff, Index max_dim = 10);

/// Saddle of x^T M v - (beta/2)||v||^2 over simplices by projected gradient on
/// the convex envelope x -> max_v G(x, v). Returns nullopt when the fixed-point
/// residual does not reach `tol`.
std::optional<std::pair<Vector, Vector>> smoothed_saddle_reference(const Matrix& payoff, double beta,
                                                                   double tol = 1e-12);

/// G(x, v) as an extended real: +inf when x is outside dom f, otherwise -inf
/// when v is outside dom g*.
double evaluate_gap(const SaddleProblem& p, const Vector& x, const Vector& v);

/// sup over v' of G(x, v'), exact for the simplex kinds.
double sup_over_dual(const SaddleProblem& p, const Vector& x);
/// inf over x' of G(x', v), exact for the simplex kinds.
double inf_over_primal(const SaddleProblem& p, const Vector& v);

/// sup_v' G(x, v') - inf_x' G(x', v). Throws NotComputable for generic problems.
double duality_gap(const SaddleProblem& p, const Vector& x, const Vector& v);

}  // namespace srfb
