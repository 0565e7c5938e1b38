#pragma once

// Unbiased stochastic estimates r of B(y), and the summability tests on
// their variance.

#include "srfb/operators.hpp"
#include "srfb/schedules.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace srfb {

/// sigma_n^2 as a closed form: 0, c, or c/(n + 1)^p.
class VarianceSchedule {
 public:
  enum class Kind { zero, constant, power };

  static VarianceSchedule zero() { return VarianceSchedule(Kind::zero, 0.0, 0.0); }
  static VarianceSchedule constant(double c);
  static VarianceSchedule power(double c, double p);

  /// sigma_n^2. Indices below 0 are clamped to 0.
  double operator()(long long n) const;

  Kind kind() const noexcept { return kind_; }
  double c() const noexcept { return c_; }
  double p() const noexcept { return p_; }
  /// Exponent q with sigma_n^2 ~ n^-q; +inf when identically zero.
  double decay_order() const;

 private:
  VarianceSchedule(Kind kind, double c, double p) : kind_(kind), c_(c), p_(p) {}
  Kind kind_;
  double c_;
  double p_;
};

enum class VarianceCondition {
  sum_finite,           // sum sigma_n^2 < inf
  weighted_sum_finite,  // sum gamma_n^2 sigma_n^2 < inf
  bounded               // sup sigma_n^2 < inf
};

enum class Verdict { pass, fail, undecidable };

struct VarianceVerdict {
  Verdict verdict = Verdict::undecidable;
  std::string reason;
  bool passed() const noexcept { return verdict == Verdict::pass; }
};

std::string to_string(Verdict v);
std::string to_string(VarianceCondition c);

/// p-series test on the closed forms. A missing schedule (noise model with no
/// closed-form variance) yields `undecidable`.
VarianceVerdict validate_variance(const std::optional<VarianceSchedule>& variance,
                                  const StepSchedule& step, VarianceCondition condition);

class NoiseModel {
 public:
  enum class Kind { exact, gaussian, minibatch };

  static NoiseModel exact() { return NoiseModel(Kind::exact, VarianceSchedule::zero(), {}, 0); }
  /// Isotropic additive noise with E||noise||^2 = sigma_n^2, split equally
  /// across coordinates.
  static NoiseModel gaussian(VarianceSchedule variance) {
    return NoiseModel(Kind::gaussian, variance, {}, 0);
  }
  /// Mean over `batch` components drawn uniformly with replacement.
  static NoiseModel minibatch(std::vector<MonotoneMap> components, int batch);

  Kind kind() const noexcept { return kind_; }
  const VarianceSchedule& variance() const noexcept { return variance_; }
  const std::vector<MonotoneMap>& components() const noexcept { return components_; }
  int batch() const noexcept { return batch_; }

 private:
  NoiseModel(Kind kind, VarianceSchedule variance, std::vector<MonotoneMap> components, int batch)
      : kind_(kind), variance_(variance), components_(std::move(components)), batch_(batch) {}

  Kind kind_;
  VarianceSchedule variance_;
  std::vector<MonotoneMap> components_;
  int batch_;
};

/// Owns one random stream. Not thread-safe: each run owns its oracle.
class StochasticOracle {
 public:
  /// The stream is seeded from (seed, stream) so that several oracles driven by
  /// one seed (primal and dual, say) stay independent.
  StochasticOracle(MonotoneMap base, NoiseModel noise, std::uint64_t seed, std::uint64_t stream = 0);

  /// r_n at y. Consumes random numbers only when the noise is non-degenerate.
  Vector draw(long long n, const Vector& y);

  const MonotoneMap& base() const noexcept { return base_; }
  const NoiseModel& noise() const noexcept { return noise_; }
  bool is_exact() const noexcept;
  /// Closed-form sigma_n^2 when the model has one.
  std::optional<VarianceSchedule> variance_schedule() const;

 private:
  MonotoneMap base_;
  NoiseModel noise_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
};

}  // namespace srfb
