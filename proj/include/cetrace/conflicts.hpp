#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cetrace/clustering.hpp"
#include "cetrace/segmentation.hpp"
#include "cetrace/stats.hpp"

namespace cetrace {

/// The slice of an edit needed to evaluate a case, detached from the log.
/// `index` is the edit's offset within its session; it also orders edits that
/// share a timestamp.
struct OpPoint {
  std::size_t index = 0;
  Timestamp ts{};
  std::int64_t pos = 0;
  AuthorId author{};

  bool operator==(const OpPoint&) const = default;
};

OpPoint point_of(const Session& session, std::size_t index);

enum class Outcome { Consider, Potential, Conflict };

std::string_view to_string(Outcome outcome);

struct ConflictOptions {
  /// Border conflicts accept only the [X, X', Y] position orientation instead
  /// of both [X, X', Y] and [Y, X', X].
  bool strict_def3 = false;
};

/// Edits sorted by (ts, index) whose consecutive time distances are < t.
bool is_time_run(std::span<const OpPoint> seq, Duration t);

/// Strictly increasing positions with consecutive distances < p.
bool is_position_run(std::span<const OpPoint> seq, std::int64_t p);

/// An author switch point: Y directly follows X in time and belongs to
/// another author. X' is the edit right after Y, if the session has one.
struct BorderCase {
  std::size_t session_index = 0;
  OpPoint x;
  OpPoint y;
  std::optional<OpPoint> x_prime;
  Duration time_distance{};
  std::int64_t position_distance = 0;
  Outcome outcome = Outcome::Consider;
  std::optional<Window> window;  // set once evaluated
};

/// X1, a maximal block of another single author's edits, then X2 by X1's
/// author. X' is the edit right after X2, if any.
struct InsertionCase {
  std::size_t session_index = 0;
  OpPoint x1;
  std::vector<OpPoint> y_block;
  OpPoint x2;
  std::optional<OpPoint> x_prime;
  std::vector<OpPoint> witness;  // chosen position run between X1 and X2, if any
  Duration time_distance{};      // ts(X2) - ts(X1)
  std::int64_t position_distance = 0;
  Outcome outcome = Outcome::Consider;
  std::optional<Window> window;
};

/// Throws UsageError for single-author sessions.
std::vector<BorderCase> find_border_cases(const Session& session);
std::vector<InsertionCase> find_insertion_cases(const Session& session);

Outcome evaluate_border(const BorderCase& c, const Window& window,
                        const ConflictOptions& options = {});

/// Y-block edits strictly between pos(X1) and pos(X2), sorted by position and
/// deduplicated, when they chain the two endpoints with gaps < p. Empty if no
/// such chain exists.
std::vector<OpPoint> position_witness(const InsertionCase& c, std::int64_t p);

Outcome evaluate_insertion(const InsertionCase& c, const Window& window);

struct SessionConflicts {
  std::vector<BorderCase> border;
  std::vector<InsertionCase> insertion;
};

/// Finds and evaluates every case of a co-author session.
SessionConflicts analyze_session(const Session& session, const Window& window,
                                 const ConflictOptions& options = {});

struct CaseCounts {
  std::size_t consider = 0;
  std::size_t potential = 0;
  std::size_t conflict = 0;

  CaseCounts& operator+=(const CaseCounts& o) {
    consider += o.consider;
    potential += o.potential;
    conflict += o.conflict;
    return *this;
  }
  bool operator==(const CaseCounts&) const = default;
};

/// Per-document reduction of one case type.
struct DocCaseStats {
  CaseCounts counts;
  std::vector<double> conflict_seconds;
  std::vector<double> conflict_chars;
};

struct DocConflictStats {
  std::string doc_id;
  std::size_t cas_count = 0;
  DocCaseStats border;
  DocCaseStats insertion;
};

DocConflictStats doc_conflict_stats(const EditLog& log, const Window& window, Duration base_gap,
                                    const ConflictOptions& options = {});

/// One column of the conflict table. Estimates are across documents; a
/// missing estimate means no document contributed (0/0 everywhere).
struct ConflictColumn {
  CaseCounts totals;
  std::optional<IntervalEstimate> potential_over_consider;
  std::optional<IntervalEstimate> conflict_over_potential;
  std::optional<IntervalEstimate> conflict_time_distance;      // seconds
  std::optional<IntervalEstimate> conflict_position_distance;  // characters
};

struct ConflictTable {
  Window window;
  Duration base_gap{};
  double level = 0.99;
  std::size_t documents = 0;
  std::size_t cas_count = 0;
  bool no_cas = false;  // no co-author sessions anywhere: all cells empty
  ConflictColumn border;
  ConflictColumn insertion;
};

struct SurveyOptions {
  ConflictOptions conflict;
  double level = 0.99;
  unsigned jobs = 1;
};

ConflictTable conflict_survey(std::span<const EditLog> corpus, const Window& window,
                              Duration base_gap, const SurveyOptions& options = {});

/// Reduces per-document stats into a table; associative over document order.
ConflictTable reduce_conflicts(std::span<const DocConflictStats> docs, const Window& window,
                               Duration base_gap, double level);

}  // namespace cetrace
