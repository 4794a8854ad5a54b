#pragma once

#include <cstddef>
#include <span>

namespace cetrace {

/// Normal-approximation interval around a sample mean.
struct IntervalEstimate {
  double mean = 0;
  double lo = 0;
  double hi = 0;
  std::size_t n = 0;
  double level = 0.99;
  // n == 1: no spread available, lo == hi == mean.
  bool degenerate = false;

  double half_width() const { return (hi - lo) / 2; }
  bool operator==(const IntervalEstimate&) const = default;
};

/// Two-sided z quantile. Supported levels: 0.90, 0.95, 0.99.
double z_value(double level);

/// mean +- z(level) * s / sqrt(n), s being the sample standard deviation
/// (n - 1 denominator). Throws DataError on empty input.
IntervalEstimate mean_ci(std::span<const double> samples, double level);

/// Clamps to [0, 1]. `mean` is left alone.
IntervalEstimate clamp_proportion(IntervalEstimate estimate);

/// Clamps the lower bound to 0 for quantities that cannot be negative
/// (distances, durations).
IntervalEstimate clamp_nonnegative(IntervalEstimate estimate);

double mean_of(std::span<const double> samples);

}  // namespace cetrace
