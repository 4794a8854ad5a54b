#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cetrace/segmentation.hpp"
#include "cetrace/types.hpp"

namespace cetrace {

/// Time-position window [t, p]: `t` bounds time distance, `p` bounds
/// position distance in characters. Both bounds are exclusive.
struct Window {
  Duration t{};
  std::int64_t p = 0;

  bool operator==(const Window&) const = default;
};

/// Throws UsageError unless t > 0 and p > 0.
void validate(const Window& window);

/// "30s,10c" style label.
std::string to_string(const Window& window);

struct Cluster {
  std::size_t session_index = 0;
  std::vector<std::size_t> members;  // indices into Session::ops, ascending
  Timestamp min_ts{};
  Timestamp max_ts{};
  std::int64_t min_pos = 0;
  std::int64_t max_pos = 0;
};

/// Connected components of the session's edits under the link relation
/// |dts| < t and |dpos| < p (single linkage). Components are ordered by their
/// earliest member.
std::vector<Cluster> clusterize(const Session& session, const Window& window);

}  // namespace cetrace
