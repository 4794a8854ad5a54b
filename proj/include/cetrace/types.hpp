#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace cetrace {

using Duration = std::chrono::milliseconds;
using Timestamp = std::chrono::sys_time<Duration>;

inline constexpr Timestamp from_millis(std::int64_t ms) { return Timestamp{Duration{ms}}; }
inline constexpr std::int64_t to_millis(Timestamp ts) { return ts.time_since_epoch().count(); }
inline constexpr double to_seconds(Duration d) { return static_cast<double>(d.count()) / 1000.0; }

/// Index into an EditLog's author table.
struct AuthorId {
  std::uint32_t value = 0;
  auto operator<=>(const AuthorId&) const = default;
};

/// Raised when input data cannot be analyzed (empty corpus, malformed
/// parameters, infeasible synthetic plans). The CLI maps it to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for invalid caller-supplied arguments (non-positive gaps, bad
/// interval lists). The CLI maps it to exit code 1.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace cetrace
