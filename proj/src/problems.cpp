#include "srfb/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace srfb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vector normal_vector(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> normal;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

double largest_sym_eigenvalue(const Matrix& s) {
  if (s.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s, Eigen::EigenvaluesOnly);
  return std::max(eig.eigenvalues().maxCoeff(), 0.0);
}

bool on_simplex(const Vector& x) {
  const double tol = 1e-12 * static_cast<double>(x.size());
  return (x.array() >= -tol).all() && std::abs(x.sum() - 1.0) <= tol;
}

// Solves for the mixing vector w (length k) with sum w = 1 that equalizes
// every entry of sub^T w. Returns nullopt when the system is singular.
std::optional<Vector> equalizer(const Matrix& sub) {
  const Index k = sub.rows();
  Matrix sys = Matrix::Zero(k + 1, k + 1);
  sys.topLeftCorner(k, k) = sub.transpose();
  sys.topRightCorner(k, 1).setConstant(-1.0);
  sys.bottomLeftCorner(1, k).setOnes();
  Vector rhs = Vector::Zero(k + 1);
  rhs(k) = 1.0;
  Eigen::FullPivLU<Matrix> lu(sys);
  if (!lu.isInvertible()) return std::nullopt;
  return Vector(lu.solve(rhs).head(k));
}

// Advances `idx` to the next k-subset of {0..n-1} in lexicographic order.
bool next_subset(std::vector<Index>& idx, Index n) {
  const Index k = static_cast<Index>(idx.size());
  for (Index i = k - 1; i >= 0; --i) {
    if (idx[static_cast<std::size_t>(i)] < n - k + i) {
      ++idx[static_cast<std::size_t>(i)];
      for (Index j = i + 1; j < k; ++j) {
        idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
      }
      return true;
    }
  }
  return false;
}

std::vector<Index> first_subset(Index k) {
  std::vector<Index> idx(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  return idx;
}

Matrix submatrix(const Matrix& m, const std::vector<Index>& rows, const std::vector<Index>& cols) {
  Matrix s(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) s(static_cast<Index>(i), static_cast<Index>(j)) = m(rows[i], cols[j]);
  }
  return s;
}

}  // namespace

SmoothFunction SmoothFunction::zero(Index dim) {
  return {[](const Vector&) { return 0.0; }, MonotoneMap::zero(dim)};
}

SmoothFunction SmoothFunction::squared_norm(Index dim, double beta) {
  require_positive(beta, "squared_norm beta");
  return {[beta](const Vector& x) { return 0.5 * beta * x.squaredNorm(); },
          MonotoneMap(
              dim, [beta](const Vector& x) { return Vector(beta * x); }, beta, beta)};
}

double InclusionProblem::fixed_point_residual(const Vector& x, double gamma) const {
  return (x - A.resolvent(gamma, x - gamma * B(x))).norm();
}

InclusionProblem make_affine_inclusion(double nu, const Matrix& skew, const Vector& shift) {
  if (!(nu >= 0.0)) throw InvalidParameter("make_affine_inclusion: nu must be >= 0");
  const Index d = shift.size();
  if (d < 1) throw InvalidParameter("make_affine_inclusion: dim must be >= 1");
  MonotoneMap b = MonotoneMap::affine(skew, Matrix::Zero(d, d), shift);

  const Matrix system = nu * Matrix::Identity(d, d) + skew;
  Eigen::FullPivLU<Matrix> lu(system);
  if (!lu.isInvertible()) {
    throw NumericalError("make_affine_inclusion: nu Id + S is singular, no unique zero");
  }
  const Vector xbar = -lu.solve(shift);

  const double mu = estimate_operator_norm(LinearMap::dense(skew));
  return InclusionProblem{"affine",
                          ResolvableOperator::scaled_identity(d, nu),
                          b,
                          {},
                          std::nullopt,
                          std::nullopt,
                          xbar,
                          mu,
                          nu};
}

InclusionProblem make_affine_inclusion(Index dim, double nu, double skew_scale, std::uint64_t seed) {
  if (dim < 1) throw InvalidParameter("make_affine_inclusion: dim must be >= 1");
  if (!(skew_scale >= 0.0)) throw InvalidParameter("make_affine_inclusion: skew_scale must be >= 0");
  std::mt19937_64 rng(seed);
  Matrix g(dim, dim);
  for (Index j = 0; j < dim; ++j) g.col(j) = normal_vector(rng, dim);
  const Vector shift = normal_vector(rng, dim);
  Matrix s = g - g.transpose();
  const double norm = s.rows() > 1 ? Eigen::JacobiSVD<Matrix>(s).singularValues()(0) : 0.0;
  if (norm > 0.0) s *= skew_scale / norm;
  return make_affine_inclusion(nu, s, shift);
}

Vector lasso_reference_solution(const Matrix& design, const Vector& targets, double lambda) {
  const Index m = design.rows();
  const Index d = design.cols();
  const double inv_m = 1.0 / static_cast<double>(m);
  Vector x = Vector::Zero(d);
  Vector resid = targets;  // t - D x
  const Vector col_sq = design.colwise().squaredNorm().transpose() * inv_m;

  for (int sweep = 0; sweep < 1000000; ++sweep) {
    double change = 0.0;
    for (Index j = 0; j < d; ++j) {
      if (col_sq(j) == 0.0) continue;
      const double rho = design.col(j).dot(resid) * inv_m + col_sq(j) * x(j);
      const double next = std::copysign(std::max(std::abs(rho) - lambda, 0.0), rho) / col_sq(j);
      const double delta = next - x(j);
      if (delta != 0.0) {
        resid -= delta * design.col(j);
        x(j) = next;
        change = std::max(change, std::abs(delta));
      }
    }
    if (change <= 1e-13 * (1.0 + x.cwiseAbs().maxCoeff())) break;
  }

  // Newton polish: on the support the optimality condition is linear.
  std::vector<Index> support;
  for (Index j = 0; j < d; ++j) {
    if (x(j) != 0.0) support.push_back(j);
  }
  if (!support.empty()) {
    const Index k = static_cast<Index>(support.size());
    Matrix ds(m, k);
    Vector sign(k);
    for (Index i = 0; i < k; ++i) {
      ds.col(i) = design.col(support[static_cast<std::size_t>(i)]);
      sign(i) = x(support[static_cast<std::size_t>(i)]) > 0.0 ? 1.0 : -1.0;
    }
    const Matrix gram = ds.transpose() * ds * inv_m;
    const Vector rhs = ds.transpose() * targets * inv_m - lambda * sign;
    Eigen::FullPivLU<Matrix> lu(gram);
    if (lu.isInvertible()) {
      const Vector xs = lu.solve(rhs);
      if (((xs.array() * sign.array()) > 0.0).all()) {
        Vector candidate = Vector::Zero(d);
        for (Index i = 0; i < k; ++i) candidate(support[static_cast<std::size_t>(i)]) = xs(i);
        const Vector grad = design.transpose() * (design * candidate - targets) * inv_m;
        bool kkt = true;
        for (Index j = 0; j < d; ++j) {
          if (candidate(j) == 0.0 && std::abs(grad(j)) > lambda * (1.0 + 1e-9)) kkt = false;
        }
        if (kkt) x = candidate;
      }
    }
  }
  return x;
}

InclusionProblem make_lasso(const Matrix& design, const Vector& targets, double lambda) {
  require_positive(lambda, "lasso lambda");
  const Index m = design.rows();
  const Index d = design.cols();
  if (m < 1 || d < 1) throw InvalidParameter("make_lasso: design must have at least one row and column");
  if (targets.size() != m) throw ContractViolation("make_lasso: targets length must equal design rows");
  if (!design.allFinite() || !targets.allFinite()) throw ContractViolation("make_lasso: non-finite data");

  const double inv_m = 1.0 / static_cast<double>(m);
  const Matrix gram = design.transpose() * design * inv_m;
  const double mu_h = largest_sym_eigenvalue(gram) * (1.0 + 1e-12);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  const double nu_h = std::max(eig.eigenvalues().minCoeff(), 0.0);

  auto dm = std::make_shared<const Matrix>(design);
  auto tv = std::make_shared<const Vector>(targets);
  MonotoneMap grad(
      d, [dm, tv, inv_m](const Vector& x) { return Vector(dm->transpose() * ((*dm) * x - *tv) * inv_m); },
      mu_h, nu_h);
  SmoothFunction h{[dm, tv, inv_m](const Vector& x) { return 0.5 * ((*dm) * x - *tv).squaredNorm() * inv_m; },
                   grad};

  std::vector<MonotoneMap> rows;
  rows.reserve(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) {
    auto a = std::make_shared<const Vector>(design.row(i).transpose());
    const double ti = targets(i);
    rows.emplace_back(
        d, [a, ti](const Vector& x) { return Vector((*a) * (a->dot(x) - ti)); }, a->squaredNorm());
  }

  ProxFunction f = ProxFunction::l1(d, lambda);
  return InclusionProblem{"lasso",
                          ResolvableOperator::subdifferential(f),
                          grad,
                          std::move(rows),
                          f,
                          h,
                          lasso_reference_solution(design, targets, lambda),
                          mu_h,
                          0.0};
}

std::optional<std::pair<Vector, Vector>> game_equilibrium(const Matrix& payoff, Index max_dim) {
  const Index m = payoff.rows();
  const Index n = payoff.cols();
  if (m < 1 || n < 1 || m > max_dim || n > max_dim) return std::nullopt;
  const double tol = 1e-9 * (1.0 + payoff.cwiseAbs().maxCoeff());

  for (Index k = 1; k <= std::min(m, n); ++k) {
    std::vector<Index> rows = first_subset(k);
    do {
      std::vector<Index> cols = first_subset(k);
      do {
        const Matrix sub = submatrix(payoff, rows, cols);
        // x on rows equalizes the columns in `cols`; v on cols equalizes rows.
        const auto xs = equalizer(sub);
        const auto vs = equalizer(Matrix(sub.transpose()));
        if (!xs || !vs) continue;
        if ((xs->array() < -tol).any() || (vs->array() < -tol).any()) continue;
        Vector x = Vector::Zero(m);
        Vector v = Vector::Zero(n);
        for (Index i = 0; i < k; ++i) x(rows[static_cast<std::size_t>(i)]) = std::max((*xs)(i), 0.0);
        for (Index j = 0; j < k; ++j) v(cols[static_cast<std::size_t>(j)]) = std::max((*vs)(j), 0.0);
        x /= x.sum();
        v /= v.sum();
        const double value = x.dot(payoff * v);
        // x minimizes: no row may do better; v maximizes: no column may do better.
        if ((payoff * v).minCoeff() >= value - tol && (payoff.transpose() * x).maxCoeff() <= value + tol) {
          return std::make_pair(x, v);
        }
      } while (next_subset(cols, n));
    } while (next_subset(rows, m));
  }
  return std::nullopt;
}

std::optional<std::pair<Vector, Vector>> smoothed_saddle_reference(const Matrix& payoff, double beta,
                                                                   double tol) {
  require_positive(beta, "smoothed saddle beta");
  const Index m = payoff.rows();
  const double norm = Eigen::JacobiSVD<Matrix>(payoff).singularValues()(0);
  const double step = norm > 0.0 ? beta / (norm * norm) : 1.0;
  auto best_v = [&](const Vector& x) { return project_simplex(payoff.transpose() * x / beta); };

  Vector x = Vector::Constant(m, 1.0 / static_cast<double>(m));
  for (int it = 0; it < 2000000; ++it) {
    const Vector next = project_simplex(x - step * payoff * best_v(x));
    const double move = (next - x).norm();
    x = next;
    if (move <= tol) return std::make_pair(x, best_v(x));
  }
  return std::nullopt;
}

SaddleProblem make_matrix_game(const Matrix& payoff) {
  if (payoff.rows() < 1 || payoff.cols() < 1) throw InvalidParameter("make_matrix_game: empty payoff");
  if (!payoff.allFinite()) throw ContractViolation("make_matrix_game: non-finite payoff");
  const Index m = payoff.rows();
  const Index n = payoff.cols();
  const double norm = Eigen::JacobiSVD<Matrix>(payoff).singularValues()(0);
  SaddleProblem p{"matrix_game",
                  ProxFunction::simplex_indicator(m),
                  ProxFunction::simplex_indicator(n),
                  LinearMap::dense(payoff.transpose(), norm),
                  SmoothFunction::zero(m),
                  SmoothFunction::zero(n),
                  game_equilibrium(payoff),
                  SaddleKind::bilinear_simplex,
                  payoff,
                  0.0,
                  norm};
  return p;
}

SaddleProblem make_smoothed_saddle(const Matrix& payoff, double beta) {
  require_positive(beta, "make_smoothed_saddle beta");
  SaddleProblem p = make_matrix_game(payoff);
  p.name = "smoothed_saddle";
  p.l = SmoothFunction::squared_norm(payoff.cols(), beta);
  p.kind = SaddleKind::smoothed_simplex;
  p.beta = beta;
  p.known_saddle = smoothed_saddle_reference(payoff, beta);
  return p;
}

double evaluate_gap(const SaddleProblem& p, const Vector& x, const Vector& v) {
  require_dim(x, p.primal_dim(), "evaluate_gap x");
  require_dim(v, p.dual_dim(), "evaluate_gap v");
  const double fx = p.f.value(x);
  if (std::isinf(fx)) return kInf;
  const double gv = p.gstar.value(v);
  if (std::isinf(gv)) return -kInf;
  return p.h.value(x) + fx + p.K.apply(x).dot(v) - gv - p.l.value(v);
}

double sup_over_dual(const SaddleProblem& p, const Vector& x) {
  require_dim(x, p.primal_dim(), "sup_over_dual");
  switch (p.kind) {
    case SaddleKind::bilinear_simplex:
      return (p.payoff.transpose() * x).maxCoeff();
    case SaddleKind::smoothed_simplex: {
      const Vector w = p.payoff.transpose() * x;
      const Vector v = project_simplex(w / p.beta);
      return w.dot(v) - 0.5 * p.beta * v.squaredNorm();
    }
    case SaddleKind::generic:
      break;
  }
  throw NotComputable("sup over the dual variable is not available for this problem class");
}

double inf_over_primal(const SaddleProblem& p, const Vector& v) {
  require_dim(v, p.dual_dim(), "inf_over_primal");
  switch (p.kind) {
    case SaddleKind::bilinear_simplex:
      return (p.payoff * v).minCoeff();
    case SaddleKind::smoothed_simplex:
      return (p.payoff * v).minCoeff() - 0.5 * p.beta * v.squaredNorm();
    case SaddleKind::generic:
      break;
  }
  throw NotComputable("inf over the primal variable is not available for this problem class");
}

double duality_gap(const SaddleProblem& p, const Vector& x, const Vector& v) {
  if (p.kind == SaddleKind::generic) {
    throw NotComputable("duality gap is only exact for simplex-constrained games");
  }
  if (!on_simplex(x) || !on_simplex(v)) throw ContractViolation("duality_gap: infeasible point");
  return sup_over_dual(p, x) - inf_over_primal(p, v);
}

}  // namespace srfb
