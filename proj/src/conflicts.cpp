#include "cetrace/conflicts.hpp"

#include <algorithm>

#include "cetrace/parallel.hpp"

namespace cetrace {

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Consider:
      return "consider";
    case Outcome::Potential:
      return "potential";
    case Outcome::Conflict:
      return "conflict";
  }
  return "?";
}

OpPoint point_of(const Session& session, std::size_t index) {
  const auto& op = session.ops[index];
  return {index, op.ts, op.pos, op.author};
}

bool is_time_run(std::span<const OpPoint> seq, Duration t) {
  for (std::size_t i = 1; i < seq.size(); ++i) {
    const auto& a = seq[i - 1];
    const auto& b = seq[i];
    const bool later = b.ts > a.ts || (b.ts == a.ts && b.index > a.index);
    if (!later || b.ts - a.ts >= t) return false;
  }
  return true;
}

bool is_position_run(std::span<const OpPoint> seq, std::int64_t p) {
  for (std::size_t i = 1; i < seq.size(); ++i) {
    if (seq[i].pos <= seq[i - 1].pos || seq[i].pos - seq[i - 1].pos >= p) return false;
  }
  return true;
}

namespace {

void require_cas(const Session& session) {
  if (session.kind != SessionKind::CAS) throw UsageError("not a co-author session");
}

std::int64_t abs_diff(std::int64_t a, std::int64_t b) { return a > b ? a - b : b - a; }

bool by_one_of(const OpPoint& op, AuthorId a, AuthorId b) {
  return op.author == a || op.author == b;
}

}  // namespace

std::vector<BorderCase> find_border_cases(const Session& session) {
  require_cas(session);
  std::vector<BorderCase> cases;
  const auto n = session.ops.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (session.ops[i].author == session.ops[i + 1].author) continue;
    BorderCase c;
    c.session_index = session.index;
    c.x = point_of(session, i);
    c.y = point_of(session, i + 1);
    if (i + 2 < n) c.x_prime = point_of(session, i + 2);
    c.time_distance = c.y.ts - c.x.ts;
    c.position_distance = abs_diff(c.x.pos, c.y.pos);
    cases.push_back(std::move(c));
  }
  return cases;
}

std::vector<InsertionCase> find_insertion_cases(const Session& session) {
  require_cas(session);
  const auto ops = session.ops;
  const auto n = ops.size();

  struct Run {
    std::size_t begin, end;
  };
  std::vector<Run> runs;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && ops[j].author == ops[i].author) ++j;
    runs.push_back({i, j});
    i = j;
  }

  std::vector<InsertionCase> cases;
  for (std::size_t r = 1; r + 1 < runs.size(); ++r) {
    const auto& before = runs[r - 1];
    const auto& block = runs[r];
    const auto& after = runs[r + 1];
    if (ops[before.begin].author != ops[after.begin].author) continue;

    InsertionCase c;
    c.session_index = session.index;
    c.x1 = point_of(session, before.end - 1);
    for (auto k = block.begin; k < block.end; ++k) c.y_block.push_back(point_of(session, k));
    c.x2 = point_of(session, after.begin);
    if (after.begin + 1 < n) c.x_prime = point_of(session, after.begin + 1);
    c.time_distance = c.x2.ts - c.x1.ts;
    c.position_distance = abs_diff(c.x1.pos, c.x2.pos);
    cases.push_back(std::move(c));
  }
  return cases;
}

Outcome evaluate_border(const BorderCase& c, const Window& window, const ConflictOptions& options) {
  if (c.time_distance >= window.t || c.position_distance >= window.p) return Outcome::Consider;
  if (!c.x_prime || !by_one_of(*c.x_prime, c.x.author, c.y.author)) return Outcome::Potential;

  const OpPoint& xp = *c.x_prime;
  const OpPoint in_time[] = {c.x, c.y, xp};
  if (!is_time_run(in_time, window.t)) return Outcome::Potential;

  const OpPoint forward[] = {c.x, xp, c.y};
  const OpPoint mirrored[] = {c.y, xp, c.x};
  const bool between = is_position_run(forward, window.p) ||
                       (!options.strict_def3 && is_position_run(mirrored, window.p));
  return between ? Outcome::Conflict : Outcome::Potential;
}

std::vector<OpPoint> position_witness(const InsertionCase& c, std::int64_t p) {
  const auto lo = std::min(c.x1.pos, c.x2.pos);
  const auto hi = std::max(c.x1.pos, c.x2.pos);
  std::vector<OpPoint> inside;
  for (const auto& y : c.y_block) {
    if (y.pos > lo && y.pos < hi) inside.push_back(y);
  }
  std::sort(inside.begin(), inside.end(), [](const OpPoint& a, const OpPoint& b) {
    return a.pos != b.pos ? a.pos < b.pos : a.index < b.index;
  });
  inside.erase(std::unique(inside.begin(), inside.end(),
                           [](const OpPoint& a, const OpPoint& b) { return a.pos == b.pos; }),
               inside.end());
  if (inside.empty()) return {};

  // Every interior point only shortens the gaps, so the full set is the
  // tightest chain: a witness exists iff it has no gap >= p.
  auto prev = lo;
  for (const auto& y : inside) {
    if (y.pos - prev >= p) return {};
    prev = y.pos;
  }
  if (hi - prev >= p) return {};
  return inside;
}

namespace {

Outcome evaluate_insertion_with(const InsertionCase& c, const Window& window, bool has_witness) {
  std::vector<OpPoint> in_time;
  in_time.reserve(c.y_block.size() + 3);
  in_time.push_back(c.x1);
  in_time.insert(in_time.end(), c.y_block.begin(), c.y_block.end());
  in_time.push_back(c.x2);
  if (!is_time_run(in_time, window.t) || !has_witness) return Outcome::Consider;

  if (!c.x_prime) return Outcome::Potential;
  const OpPoint& xp = *c.x_prime;
  const AuthorId other = c.y_block.front().author;
  if (!by_one_of(xp, c.x1.author, other)) return Outcome::Potential;
  const OpPoint tail[] = {c.x2, xp};
  if (!is_time_run(tail, window.t)) return Outcome::Potential;
  const auto lo = std::min(c.x1.pos, c.x2.pos);
  const auto hi = std::max(c.x1.pos, c.x2.pos);
  return xp.pos > lo && xp.pos < hi ? Outcome::Conflict : Outcome::Potential;
}

}  // namespace

Outcome evaluate_insertion(const InsertionCase& c, const Window& window) {
  return evaluate_insertion_with(c, window, !position_witness(c, window.p).empty());
}

SessionConflicts analyze_session(const Session& session, const Window& window,
                                 const ConflictOptions& options) {
  validate(window);
  SessionConflicts out;
  out.border = find_border_cases(session);
  for (auto& c : out.border) {
    c.outcome = evaluate_border(c, window, options);
    c.window = window;
  }
  out.insertion = find_insertion_cases(session);
  for (auto& c : out.insertion) {
    c.witness = position_witness(c, window.p);
    c.outcome = evaluate_insertion_with(c, window, !c.witness.empty());
    c.window = window;
  }
  return out;
}

namespace {

template <class Case>
void tally(const Case& c, DocCaseStats& stats) {
  ++stats.counts.consider;
  if (c.outcome == Outcome::Consider) return;
  ++stats.counts.potential;
  if (c.outcome != Outcome::Conflict) return;
  ++stats.counts.conflict;
  stats.conflict_seconds.push_back(to_seconds(c.time_distance));
  stats.conflict_chars.push_back(static_cast<double>(c.position_distance));
}

}  // namespace

DocConflictStats doc_conflict_stats(const EditLog& log, const Window& window, Duration base_gap,
                                    const ConflictOptions& options) {
  DocConflictStats stats;
  stats.doc_id = log.doc_id;
  for (const auto& session : segment(log, base_gap)) {
    if (session.kind != SessionKind::CAS) continue;
    ++stats.cas_count;
    const auto found = analyze_session(session, window, options);
    for (const auto& c : found.border) tally(c, stats.border);
    for (const auto& c : found.insertion) tally(c, stats.insertion);
  }
  return stats;
}

namespace {

std::optional<IntervalEstimate> estimate(const std::vector<double>& samples, double level) {
  if (samples.empty()) return std::nullopt;
  return mean_ci(samples, level);
}

ConflictColumn reduce_column(std::span<const DocConflictStats> docs,
                             DocCaseStats DocConflictStats::*member, double level) {
  ConflictColumn col;
  std::vector<double> potential_share, conflict_share, seconds, chars;
  for (const auto& doc : docs) {
    const DocCaseStats& s = doc.*member;
    col.totals += s.counts;
    if (s.counts.consider > 0) {
      potential_share.push_back(static_cast<double>(s.counts.potential) /
                                static_cast<double>(s.counts.consider));
    }
    if (s.counts.potential > 0) {
      conflict_share.push_back(static_cast<double>(s.counts.conflict) /
                               static_cast<double>(s.counts.potential));
    }
    if (!s.conflict_seconds.empty()) {
      seconds.push_back(mean_of(s.conflict_seconds));
      chars.push_back(mean_of(s.conflict_chars));
    }
  }
  if (auto e = estimate(potential_share, level)) col.potential_over_consider = clamp_proportion(*e);
  if (auto e = estimate(conflict_share, level)) col.conflict_over_potential = clamp_proportion(*e);
  if (auto e = estimate(seconds, level)) col.conflict_time_distance = clamp_nonnegative(*e);
  if (auto e = estimate(chars, level)) col.conflict_position_distance = clamp_nonnegative(*e);
  return col;
}

}  // namespace

ConflictTable reduce_conflicts(std::span<const DocConflictStats> docs, const Window& window,
                               Duration base_gap, double level) {
  ConflictTable table;
  table.window = window;
  table.base_gap = base_gap;
  table.level = level;
  table.documents = docs.size();
  for (const auto& d : docs) table.cas_count += d.cas_count;
  table.no_cas = table.cas_count == 0;
  if (table.no_cas) return table;
  table.border = reduce_column(docs, &DocConflictStats::border, level);
  table.insertion = reduce_column(docs, &DocConflictStats::insertion, level);
  return table;
}

ConflictTable conflict_survey(std::span<const EditLog> corpus, const Window& window,
                              Duration base_gap, const SurveyOptions& options) {
  if (corpus.empty()) throw DataError("empty corpus");
  validate(window);
  const auto docs = parallel_map<DocConflictStats>(corpus.size(), options.jobs, [&](std::size_t i) {
    return doc_conflict_stats(corpus[i], window, base_gap, options.conflict);
  });
  return reduce_conflicts(docs, window, base_gap, options.level);
}

}  // namespace cetrace
