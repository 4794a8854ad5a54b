#include "cetrace/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cetrace/types.hpp"

namespace cetrace {

double z_value(double level) {
  struct Quantile {
    double level;
    double z;
  };
  static constexpr Quantile kTable[] = {{0.90, 1.645}, {0.95, 1.960}, {0.99, 2.576}};
  for (const auto& q : kTable) {
    if (std::abs(q.level - level) < 1e-9) return q.z;
  }
  throw UsageError("unsupported confidence level " + std::to_string(level) +
                   " (expected 0.90, 0.95 or 0.99)");
}

double mean_of(std::span<const double> samples) {
  if (samples.empty()) throw DataError("mean of empty sample");
  return std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
}

IntervalEstimate mean_ci(std::span<const double> samples, double level) {
  const double z = z_value(level);
  if (samples.empty()) throw DataError("confidence interval of empty sample");

  IntervalEstimate out;
  out.n = samples.size();
  out.level = level;
  out.mean = mean_of(samples);
  if (out.n == 1) {
    out.lo = out.hi = out.mean;
    out.degenerate = true;
    return out;
  }
  double ss = 0;
  for (double x : samples) ss += (x - out.mean) * (x - out.mean);
  const double sd = std::sqrt(ss / static_cast<double>(out.n - 1));
  const double half = z * sd / std::sqrt(static_cast<double>(out.n));
  out.lo = out.mean - half;
  out.hi = out.mean + half;
  return out;
}

IntervalEstimate clamp_proportion(IntervalEstimate e) {
  e.lo = std::clamp(e.lo, 0.0, 1.0);
  e.hi = std::clamp(e.hi, 0.0, 1.0);
  return e;
}

IntervalEstimate clamp_nonnegative(IntervalEstimate e) {
  e.lo = std::max(e.lo, 0.0);
  return e;
}

}  // namespace cetrace
