#pragma once

// Reference implementations written straight from the definitions, with no
// shared code paths beyond the data types. Used by the test suites and the
// `selftest` subcommand to cross-check the optimized modules.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cetrace/clustering.hpp"
#include "cetrace/conflicts.hpp"
#include "cetrace/segmentation.hpp"

namespace cetrace::oracle {

inline constexpr std::size_t kMaxSessionOps = 200;
inline constexpr std::size_t kMaxBlock = 12;

/// Session boundaries by the direct rule: edit i opens a session iff i == 0
/// or ts(i) - ts(i-1) >= gap.
std::vector<Session> segment(const EditLog& log, Duration gap);

/// Components of the O(n^2) link graph, found by breadth-first search; each
/// component lists session indices ascending, components ordered by first
/// member.
std::vector<std::vector<std::size_t>> clusterize(const Session& session, const Window& window);

enum class CaseKind { Border, Insertion };

struct Case {
  CaseKind kind = CaseKind::Border;
  // Border: {X, Y}. Insertion: {X1, Y1..Yk, X2}. Session indices.
  std::vector<std::size_t> members;
  std::optional<std::size_t> x_prime;
  Outcome outcome = Outcome::Consider;

  bool operator==(const Case&) const = default;
};

/// Every border and insertion case of a co-author session with its outcome,
/// insertion witnesses found by enumerating all nonempty subsets of the
/// Y-block. Throws DataError("oracle bound exceeded") beyond kMaxSessionOps
/// edits or a Y-block beyond kMaxBlock edits.
std::vector<Case> conflicts(const Session& session, const Window& window,
                            const ConflictOptions& options = {});

/// The optimized module's results in oracle form, border cases first.
std::vector<Case> as_cases(const SessionConflicts& found);

struct EquivalenceReport {
  std::size_t documents = 0;
  std::size_t sessions = 0;
  std::size_t cases = 0;
  std::size_t segment_mismatches = 0;
  std::size_t cluster_mismatches = 0;
  std::size_t conflict_mismatches = 0;
  std::vector<std::string> first_failures;  // up to 10 descriptions

  std::size_t mismatches() const {
    return segment_mismatches + cluster_mismatches + conflict_mismatches;
  }
};

/// Runs segmentation, clustering and conflict detection against the oracles
/// on `documents` random documents seeded first_seed, first_seed + 1, ...
/// under `windows`, in both position-orientation modes.
EquivalenceReport run_equivalence(std::uint64_t first_seed, std::size_t documents,
                                  const std::vector<Window>& windows);

}  // namespace cetrace::oracle
