#include "srfb/operators.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace srfb;
using namespace testing_support;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

std::vector<ResolvableOperator> shipped_resolvents(Index d, std::mt19937_64& rng) {
  Vector lo = random_vector(rng, d);
  Vector hi = lo + random_vector(rng, d).cwiseAbs();
  return {ResolvableOperator::zero(d),
          ResolvableOperator::scaled_identity(d, 0.7),
          ResolvableOperator::subdifferential(ProxFunction::l1(d, 0.3)),
          ResolvableOperator::subdifferential(ProxFunction::squared_l2(d, 2.0)),
          ResolvableOperator::subdifferential(ProxFunction::simplex_indicator(d)),
          ResolvableOperator::normal_cone_box(lo, hi),
          ResolvableOperator::normal_cone_ball(random_vector(rng, d), 1.5)};
}

std::vector<ProxFunction> shipped_prox(Index d, std::mt19937_64& rng) {
  Vector lo = random_vector(rng, d);
  Vector hi = lo + random_vector(rng, d).cwiseAbs();
  return {ProxFunction::zero(d),
          ProxFunction::l1(d, 0.4),
          ProxFunction::squared_l2(d, 1.3),
          ProxFunction::box_indicator(lo, hi),
          ProxFunction::ball_indicator(random_vector(rng, d), 0.8),
          ProxFunction::simplex_indicator(d),
          ProxFunction::origin_indicator(d)};
}

}  // namespace

TEST_SUITE("operators") {
  TEST_CASE("apply_map evaluates identity, planar rotation and affine maps") {
    CHECK(MonotoneMap::identity(2)(vec({1, 2})) == vec({1, 2}));

    Matrix rot(2, 2);
    rot << 0, 1, -1, 0;
    const auto skew = MonotoneMap::affine(rot, Matrix::Zero(2, 2), Vector::Zero(2));
    CHECK(skew(vec({1, 0})) == vec({0, -1}));

    // M = [[1,1],[-1,1]] = rotation + identity, b = (0,1): (1+1+0, -1+1+1)
    const auto aff = MonotoneMap::affine(rot, Matrix::Identity(2, 2), vec({0, 1}));
    CHECK(apply_map(aff, vec({1, 1})) == vec({2, 1}));
    CHECK(aff.lipschitz() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(aff.modulus() == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("apply_map rejects wrong dimension and non-finite input") {
    const auto id = MonotoneMap::identity(2);
    CHECK_THROWS_AS(id(vec({1, 2, 3})), ContractViolation);
    CHECK_THROWS_AS(id(vec({1, std::numeric_limits<double>::quiet_NaN()})), ContractViolation);
  }

  TEST_CASE("affine maps reject non-skew and indefinite parts") {
    Matrix bad(2, 2);
    bad << 0, 1, 1, 0;
    CHECK_THROWS_AS(MonotoneMap::affine(bad, Matrix::Zero(2, 2), Vector::Zero(2)), InvalidParameter);
    Matrix indef(2, 2);
    indef << 1, 0, 0, -1;
    CHECK_THROWS_AS(MonotoneMap::affine(Matrix::Zero(2, 2), indef, Vector::Zero(2)), InvalidParameter);
  }

  TEST_CASE("resolvent closed forms") {
    CHECK(ResolvableOperator::zero(2).resolvent(3.0, vec({3, -1})) == vec({3, -1}));
    const auto abs = ResolvableOperator::subdifferential(ProxFunction::l1(1, 1.0));
    CHECK(abs.resolvent(1.0, vec({2}))(0) == doctest::Approx(1.0));
    const auto box = ResolvableOperator::normal_cone_box(vec({0}), vec({1}));
    CHECK(resolvent(box, 5.0, vec({1.7}))(0) == 1.0);
    CHECK(ResolvableOperator::scaled_identity(1, 1.0).resolvent(0.5, vec({3}))(0) ==
          doctest::Approx(2.0));
  }

  TEST_CASE("resolvent and prox reject nonpositive steps") {
    CHECK_THROWS_AS(ResolvableOperator::zero(1).resolvent(0.0, vec({1})), InvalidParameter);
    CHECK_THROWS_AS(ResolvableOperator::zero(1).resolvent(-1.0, vec({1})), InvalidParameter);
    CHECK_THROWS_AS(ProxFunction::l1(1, 1.0).prox(0.0, vec({1})), InvalidParameter);
    CHECK_THROWS_AS(prox_conjugate(ProxFunction::l1(1, 1.0), 0.0, vec({1})), InvalidParameter);
  }

  TEST_CASE("prox_conjugate examples") {
    CHECK(prox_conjugate(ProxFunction::origin_indicator(2), 1.0, vec({2, 5})) == vec({2, 5}));

    // f = f* = (1/2)u^2: argmin (1/2)(u-2)^2 + (1/2)u^2 found by golden section
    const double direct = golden_section([](double u) { return 0.5 * (u - 2) * (u - 2) + 0.5 * u * u; }, -10, 10);
    const double via_moreau = prox_conjugate(ProxFunction::squared_l2(1, 1.0), 1.0, vec({2}))(0);
    CHECK(std::abs(via_moreau - direct) < 1e-7);
    CHECK(via_moreau == doctest::Approx(1.0));

    // f = |.|, f* = indicator of [-1, 1]
    CHECK(prox_conjugate(ProxFunction::l1(1, 1.0), 0.3, vec({2}))(0) == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("estimate_operator_norm examples") {
    CHECK(estimate_operator_norm(LinearMap::dense(Matrix::Identity(2, 2))) == doctest::Approx(1.0).epsilon(1e-12));
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 3;
    d(1, 1) = 1;
    CHECK(estimate_operator_norm(LinearMap::dense(d)) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(estimate_operator_norm(LinearMap::dense(Matrix::Zero(3, 2))) == 0.0);
    CHECK(estimate_operator_norm(LinearMap::zero(3, 2)) == 0.0);
    CHECK(estimate_operator_norm(LinearMap::dense(d, 42.0)) == 42.0);
  }

  TEST_CASE("estimate_operator_norm agrees with the SVD on random matrices") {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 20; ++k) {
      const Matrix m = random_matrix(rng, 6, 4);
      const double svd = Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
      CHECK(estimate_operator_norm(LinearMap::dense(m)) == doctest::Approx(svd).epsilon(1e-9));
    }
  }

  TEST_CASE("estimate_operator_norm reports non-convergence with its best estimate") {
    std::mt19937_64 rng(3);
    const Matrix m = random_matrix(rng, 8, 8);
    try {
      estimate_operator_norm(LinearMap::dense(m), 1e-15, 1);
      FAIL("expected NormEstimateError");
    } catch (const NormEstimateError& e) {
      CHECK(e.best_estimate() > 0.0);
    }
  }

  TEST_CASE("simplex projection matches a bisection oracle and breaks ties by index") {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 200; ++k) {
      const Vector z = random_vector(rng, 7, 2.0);
      const Vector p = project_simplex(z);
      CHECK((p - simplex_projection_bisection(z)).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(p.minCoeff() >= 0.0);
    }
    const Vector tie = project_simplex(vec({0.5, 0.5, 0.5}));
    CHECK(tie(0) == tie(1));
    CHECK(tie(1) == tie(2));
    CHECK(tie(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(project_simplex(vec({2, 2})) == vec({0.5, 0.5}));
    CHECK(project_simplex(vec({0.2, 0.8})) == vec({0.2, 0.8}));
  }

  TEST_CASE("every shipped resolvent is firmly nonexpansive") {
    std::mt19937_64 rng(17);
    const Index d = 5;
    for (const auto& op : shipped_resolvents(d, rng)) {
      INFO(op.name());
      for (int k = 0; k < 200; ++k) {
        const double gamma = std::exp(random_vector(rng, 1)(0));
        const Vector z1 = random_vector(rng, d, 3.0);
        const Vector z2 = random_vector(rng, d, 3.0);
        const Vector j1 = op.resolvent(gamma, z1);
        const Vector j2 = op.resolvent(gamma, z2);
        CHECK((j1 - j2).dot(z1 - z2) >= (j1 - j2).squaredNorm() - 1e-10);
        CHECK(op.resolvent(gamma, z1) == j1);
      }
    }
  }

  TEST_CASE("every shipped prox satisfies the prox inequality") {
    std::mt19937_64 rng(19);
    const Index d = 5;
    for (const auto& f : shipped_prox(d, rng)) {
      INFO(f.name());
      for (int k = 0; k < 200; ++k) {
        const Vector x = random_vector(rng, d, 3.0);
        // y drawn inside dom f so both values are finite
        const Vector y = f.prox(1.0, random_vector(rng, d, 3.0));
        const Vector p = f.prox(1.0, x);
        CHECK(f.value(p) - f.value(y) <= (y - p).dot(p - x) + 1e-10);
      }
    }
  }

  TEST_CASE("Moreau decomposition reconstructs the input") {
    std::mt19937_64 rng(23);
    const Index d = 5;
    for (const auto& f : shipped_prox(d, rng)) {
      INFO(f.name());
      for (int k = 0; k < 200; ++k) {
        const double gamma = std::exp(random_vector(rng, 1)(0));
        const Vector z = random_vector(rng, d, 3.0);
        const Vector rebuilt = prox_conjugate(f, gamma, z) + gamma * f.prox(1.0 / gamma, z / gamma);
        CHECK((rebuilt - z).cwiseAbs().maxCoeff() <= 1e-12);
      }
    }
  }

  TEST_CASE("linear maps satisfy the adjoint identity") {
    std::mt19937_64 rng(29);
    std::vector<LinearMap> maps{LinearMap::identity(4), LinearMap::zero(4, 3),
                                LinearMap::dense(random_matrix(rng, 3, 4)),
                                LinearMap::dense(random_matrix(rng, 3, 4) * 100.0)};
    for (const auto& k : maps) {
      for (int t = 0; t < 200; ++t) {
        const Vector x = random_vector(rng, k.domain_dim());
        const Vector v = random_vector(rng, k.range_dim());
        const double lhs = k.apply(x).dot(v);
        const double rhs = x.dot(k.adjoint(v));
        CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(lhs)));
      }
    }
  }

  TEST_CASE("shipped maps respect their declared Lipschitz constant and modulus") {
    std::mt19937_64 rng(31);
    const Index d = 6;
    const Matrix g = random_matrix(rng, d, d);
    const Matrix h = random_matrix(rng, d, d);
    std::vector<MonotoneMap> maps{
        MonotoneMap::zero(d), MonotoneMap::identity(d),
        MonotoneMap::affine(g - g.transpose(), h * h.transpose(), random_vector(rng, d)),
        MonotoneMap::affine(2.0 * (g - g.transpose()), Matrix::Zero(d, d), Vector::Zero(d)),
        MonotoneMap::mean({MonotoneMap::identity(d),
                           MonotoneMap::affine(g - g.transpose(), Matrix::Identity(d, d), Vector::Zero(d))})};
    for (const auto& b : maps) {
      for (int k = 0; k < 200; ++k) {
        const Vector x = random_vector(rng, d, 2.0);
        const Vector y = random_vector(rng, d, 2.0);
        const Vector diff = b(x) - b(y);
        CHECK(diff.norm() <= (b.lipschitz() + 1e-9) * (x - y).norm());
        CHECK(diff.dot(x - y) >= b.modulus() * (x - y).squaredNorm() - 1e-10);
      }
    }
  }

  TEST_CASE("indicator values tolerate rounding but reject clear violations") {
    const auto simplex = ProxFunction::simplex_indicator(3);
    CHECK(simplex.value(vec({1.0 / 3, 1.0 / 3, 1.0 / 3})) == 0.0);
    CHECK(std::isinf(simplex.value(vec({0.5, 0.5, 0.5}))));
    CHECK(std::isinf(simplex.value(vec({1.2, -0.2, 0.0}))));
    const auto ball = ProxFunction::ball_indicator(Vector::Zero(2), 1.0);
    CHECK(ball.value(vec({1.0, 0.0})) == 0.0);
    CHECK(std::isinf(ball.value(vec({1.1, 0.0}))));
  }
}
