#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cetrace/log_model.hpp"
#include "cetrace/types.hpp"

namespace cetrace {

enum class SessionKind { SAS, CAS };

std::string_view to_string(SessionKind kind);

/// A maximal run of time-adjacent edits whose consecutive distances are all
/// below the segmentation gap. `ops` views into the EditLog it was cut from,
/// so the log must outlive the session.
struct Session {
  std::string doc_id;
  std::size_t index = 0;
  std::size_t first = 0;  // offset of ops.front() within the log
  std::span<const EditOp> ops;
  SessionKind kind = SessionKind::SAS;
  std::size_t author_count = 0;      // distinct authors in this session
  std::size_t doc_author_count = 0;  // distinct authors in the whole log
  Timestamp start_ts{};
  Timestamp end_ts{};

  Duration length() const { return end_ts - start_ts; }
};

/// Which author count divides a session's edit count.
enum class NormalizeScope { Session, Document };

struct SessionStats {
  std::vector<Duration> internal_distances;
  Duration length{};
  std::size_t edit_count = 0;
  double normalized_edit_count = 0;
};

/// Cuts a normalized log wherever the distance to the previous edit is >= gap.
/// Throws UsageError if gap <= 0.
std::vector<Session> segment(const EditLog& log, Duration gap);

/// start(i + 1) - end(i) for consecutive sessions of one document.
std::vector<Duration> external_distances(std::span<const Session> sessions);

SessionStats session_stats(const Session& session, NormalizeScope scope = NormalizeScope::Session);

}  // namespace cetrace
