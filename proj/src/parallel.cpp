#include "srfb/parallel.hpp"

#include "srfb/types.hpp"

#include <cmath>
#include <exception>

#include <omp.h>

namespace srfb {

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, Execution exec) {
  std::vector<std::exception_ptr> errors(count);
  const auto n = static_cast<long long>(count);
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < n; ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  } else {
    for (long long i = 0; i < n; ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

void column_stats(const SeriesMatrix& values, std::size_t j, SeriesStats& out) {
  // shifted by the first row so identical rows give exactly zero spread
  const double k = static_cast<double>(values.size());
  const double shift = values.front()[j];
  double sum = 0.0;
  for (const auto& row : values) sum += row[j] - shift;
  const double mean = sum / k;
  double ss = 0.0;
  for (const auto& row : values) ss += (row[j] - shift - mean) * (row[j] - shift - mean);
  out.mean[j] = shift + mean;
  out.stderr_[j] = std::sqrt(ss / (k - 1.0)) / std::sqrt(k);
}

}  // namespace

SeriesStats aggregate(const SeriesMatrix& values, Execution exec) {
  if (values.size() < 2) throw InvalidParameter("aggregate: needs at least two series");
  const std::size_t len = values.front().size();
  for (const auto& row : values) {
    if (row.size() != len) throw InvalidParameter("aggregate: series lengths differ");
  }
  SeriesStats out{std::vector<double>(len), std::vector<double>(len)};
  const auto n = static_cast<long long>(len);
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (long long j = 0; j < n; ++j) column_stats(values, static_cast<std::size_t>(j), out);
  } else {
    for (long long j = 0; j < n; ++j) column_stats(values, static_cast<std::size_t>(j), out);
  }
  return out;
}

int available_threads() { return omp_get_max_threads(); }

}  // namespace srfb
