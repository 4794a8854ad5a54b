#include "cetrace/segmentation.hpp"

namespace cetrace {

std::string_view to_string(SessionKind kind) { return kind == SessionKind::CAS ? "CAS" : "SAS"; }

std::vector<Session> segment(const EditLog& log, Duration gap) {
  if (gap <= Duration::zero()) throw UsageError("segmentation gap must be positive");

  std::vector<Session> sessions;
  const std::span<const EditOp> all{log.ops};
  std::vector<std::size_t> seen_in(log.authors.size(), SIZE_MAX);

  std::size_t begin = 0;
  while (begin < all.size()) {
    std::size_t end = begin + 1;
    while (end < all.size() && all[end].ts - all[end - 1].ts < gap) ++end;

    Session s;
    s.doc_id = log.doc_id;
    s.index = sessions.size();
    s.first = begin;
    s.ops = all.subspan(begin, end - begin);
    s.start_ts = s.ops.front().ts;
    s.end_ts = s.ops.back().ts;
    s.doc_author_count = log.authors.size();
    for (const auto& op : s.ops) {
      auto& mark = seen_in.at(op.author.value);
      if (mark != s.index) {
        mark = s.index;
        ++s.author_count;
      }
    }
    s.kind = s.author_count >= 2 ? SessionKind::CAS : SessionKind::SAS;
    sessions.push_back(std::move(s));
    begin = end;
  }
  return sessions;
}

std::vector<Duration> external_distances(std::span<const Session> sessions) {
  std::vector<Duration> out;
  for (std::size_t i = 1; i < sessions.size(); ++i) {
    out.push_back(sessions[i].start_ts - sessions[i - 1].end_ts);
  }
  return out;
}

SessionStats session_stats(const Session& session, NormalizeScope scope) {
  SessionStats st;
  st.edit_count = session.ops.size();
  st.length = session.length();
  st.internal_distances.reserve(session.ops.empty() ? 0 : session.ops.size() - 1);
  for (std::size_t i = 1; i < session.ops.size(); ++i) {
    st.internal_distances.push_back(session.ops[i].ts - session.ops[i - 1].ts);
  }
  const std::size_t divisor =
      scope == NormalizeScope::Session ? session.author_count : session.doc_author_count;
  st.normalized_edit_count =
      static_cast<double>(st.edit_count) / static_cast<double>(divisor == 0 ? 1 : divisor);
  return st;
}

}  // namespace cetrace
