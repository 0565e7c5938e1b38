#include "srfb/oracles.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace srfb {

namespace {

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

std::string series_text(double order) {
  std::ostringstream os;
  os << "terms decay like n^-" << order;
  return os.str();
}

}  // namespace

VarianceSchedule VarianceSchedule::constant(double c) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw InvalidParameter("variance constant must be >= 0");
  return VarianceSchedule(c == 0.0 ? Kind::zero : Kind::constant, c, 0.0);
}

VarianceSchedule VarianceSchedule::power(double c, double p) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw InvalidParameter("variance constant must be >= 0");
  if (!(p >= 0.0)) throw InvalidParameter("variance exponent must be >= 0");
  if (c == 0.0) return zero();
  return VarianceSchedule(Kind::power, c, p);
}

double VarianceSchedule::operator()(long long n) const {
  const double m = static_cast<double>(n < 0 ? 0 : n) + 1.0;
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::constant:
      return c_;
    case Kind::power:
      return c_ / std::pow(m, p_);
  }
  return 0.0;
}

double VarianceSchedule::decay_order() const {
  switch (kind_) {
    case Kind::zero:
      return std::numeric_limits<double>::infinity();
    case Kind::constant:
      return 0.0;
    case Kind::power:
      return p_;
  }
  return 0.0;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::undecidable:
      return "undecidable";
  }
  return "undecidable";
}

std::string to_string(VarianceCondition c) {
  switch (c) {
    case VarianceCondition::sum_finite:
      return "sum_finite";
    case VarianceCondition::weighted_sum_finite:
      return "weighted_sum_finite";
    case VarianceCondition::bounded:
      return "bounded";
  }
  return "unknown";
}

VarianceVerdict validate_variance(const std::optional<VarianceSchedule>& variance,
                                  const StepSchedule& step, VarianceCondition condition) {
  if (!variance) {
    return {Verdict::undecidable, "noise model has no closed-form variance schedule"};
  }
  const double q = variance->decay_order();
  if (std::isinf(q)) return {Verdict::pass, "variance is identically zero"};
  switch (condition) {
    case VarianceCondition::bounded:
      return {Verdict::pass, "sigma_n^2 <= " + std::to_string(variance->c())};
    case VarianceCondition::sum_finite:
      if (q > 1.0) return {Verdict::pass, series_text(q) + ", summable p-series"};
      return {Verdict::fail, series_text(q) + ", divergent p-series"};
    case VarianceCondition::weighted_sum_finite: {
      const double order = q + 2.0 * step.decay_order();
      if (order > 1.0) return {Verdict::pass, series_text(order) + " after weighting, summable"};
      return {Verdict::fail, series_text(order) + " after weighting, divergent"};
    }
  }
  return {Verdict::undecidable, "unknown condition"};
}

NoiseModel NoiseModel::minibatch(std::vector<MonotoneMap> components, int batch) {
  if (components.empty()) throw InvalidParameter("minibatch: no components");
  if (batch < 1) throw InvalidParameter("minibatch: batch size must be >= 1");
  return NoiseModel(Kind::minibatch, VarianceSchedule::zero(), std::move(components), batch);
}

StochasticOracle::StochasticOracle(MonotoneMap base, NoiseModel noise, std::uint64_t seed,
                                   std::uint64_t stream)
    : base_(std::move(base)), noise_(std::move(noise)), rng_(make_stream(seed, stream)) {
  for (const auto& c : noise_.components()) {
    if (c.dim() != base_.dim()) throw ContractViolation("minibatch component dimension mismatch");
  }
}

bool StochasticOracle::is_exact() const noexcept {
  return noise_.kind() == NoiseModel::Kind::exact ||
         (noise_.kind() == NoiseModel::Kind::gaussian &&
          noise_.variance().kind() == VarianceSchedule::Kind::zero);
}

std::optional<VarianceSchedule> StochasticOracle::variance_schedule() const {
  switch (noise_.kind()) {
    case NoiseModel::Kind::exact:
      return VarianceSchedule::zero();
    case NoiseModel::Kind::gaussian:
      return noise_.variance();
    case NoiseModel::Kind::minibatch:
      return std::nullopt;
  }
  return std::nullopt;
}

Vector StochasticOracle::draw(long long n, const Vector& y) {
  switch (noise_.kind()) {
    case NoiseModel::Kind::exact:
      return base_(y);
    case NoiseModel::Kind::gaussian: {
      const double var = noise_.variance()(n);
      Vector r = base_(y);
      if (var == 0.0) return r;
      const double scale = std::sqrt(var / static_cast<double>(r.size()));
      for (Index i = 0; i < r.size(); ++i) r(i) += scale * normal_(rng_);
      return r;
    }
    case NoiseModel::Kind::minibatch: {
      require_dim(y, base_.dim(), "draw");
      require_finite(y, "draw");
      const auto& comps = noise_.components();
      std::uniform_int_distribution<std::size_t> pick(0, comps.size() - 1);
      Vector acc = Vector::Zero(y.size());
      for (int b = 0; b < noise_.batch(); ++b) acc += comps[pick(rng_)](y);
      return acc / static_cast<double>(noise_.batch());
    }
  }
  return base_(y);
}

}  // namespace srfb
