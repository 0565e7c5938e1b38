#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's numerical code paths.

#include "srfb/types.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace testing_support {

using srfb::Index;
using srfb::Matrix;
using srfb::Vector;

inline Vector random_vector(std::mt19937_64& rng, Index n, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

inline Matrix random_matrix(std::mt19937_64& rng, Index m, Index n) {
  std::normal_distribution<double> normal;
  Matrix a(m, n);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) a(i, j) = normal(rng);
  }
  return a;
}

/// Projection onto the probability simplex by bisection on the threshold
/// theta solving sum max(z_i - theta, 0) = 1.
inline Vector simplex_projection_bisection(const Vector& z) {
  double lo = z.minCoeff() - 1.0;
  double hi = z.maxCoeff();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double mass = (z.array() - mid).cwiseMax(0.0).sum();
    if (mass > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return (z.array() - 0.5 * (lo + hi)).cwiseMax(0.0).matrix();
}

/// Minimizer of a strictly convex scalar function on [a, b] by golden section.
inline double golden_section(const std::function<double(double)>& f, double a, double b) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  for (int it = 0; it < 300; ++it) {
    if (f(c) < f(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - r * (b - a);
    d = a + r * (b - a);
  }
  return 0.5 * (a + b);
}

/// 2x2 linear solve by Cramer's rule.
inline Vector cramer2(double a11, double a12, double a21, double a22, double b1, double b2) {
  const double det = a11 * a22 - a12 * a21;
  Vector x(2);
  x << (b1 * a22 - a12 * b2) / det, (a11 * b2 - b1 * a21) / det;
  return x;
}

/// Random point of the probability simplex (normalized exponentials).
inline Vector random_simplex_point(std::mt19937_64& rng, Index n) {
  std::exponential_distribution<double> e(1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = e(rng);
  return v / v.sum();
}

}  // namespace testing_support
