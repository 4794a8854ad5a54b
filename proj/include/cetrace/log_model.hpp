#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cetrace/types.hpp"

namespace cetrace {

enum class Action : std::uint8_t { Insertion, Deletion };

std::string_view to_string(Action action);

/// One recorded edit. `pos` is the position recorded at edit time (range
/// start for deletions); `seq` is the ingestion ordinal used to break
/// timestamp ties.
struct EditOp {
  Timestamp ts{};
  AuthorId author{};
  Action action = Action::Insertion;
  std::int64_t pos = 0;
  std::int64_t len = 1;
  std::optional<std::string> content;
  std::uint64_t seq = 0;

  bool operator==(const EditOp&) const = default;
};

/// The edit history of one document. Authors are interned: `EditOp::author`
/// indexes `authors`.
struct EditLog {
  std::string doc_id;
  std::vector<EditOp> ops;
  std::vector<std::string> authors;

  AuthorId intern(std::string_view author);
  const std::string& author_name(AuthorId id) const { return authors.at(id.value); }

  bool operator==(const EditLog&) const = default;
};

struct LineIssue {
  std::size_t line = 0;  // 1-based
  std::string reason;

  bool operator==(const LineIssue&) const = default;
};

struct DocSummary {
  std::string doc_id;
  std::size_t authors = 0;
  std::size_t edits = 0;
  std::int64_t amount_of_edit = 0;
};

struct ValidationReport {
  std::size_t record_count = 0;
  std::vector<LineIssue> errors;
  std::vector<LineIssue> warnings;
  std::vector<DocSummary> docs;

  bool accepted() const { return errors.empty(); }
};

struct ParseResult {
  std::vector<EditLog> logs;  // in order of first appearance of each doc id
  ValidationReport report;
};

/// Reads line-delimited canonical JSON records. Bad lines are reported with
/// their line number and skipped. Logs are returned in ingestion order; call
/// `normalize` before analysis.
ParseResult parse_canonical(std::istream& in);
ParseResult parse_canonical(std::string_view text);

/// Stable sort by timestamp (ties keep ingestion order), renumber `seq` to the
/// sorted index and re-intern authors by first appearance. Idempotent.
EditLog normalize(EditLog log);

bool is_normalized(const EditLog& log);

void emit_canonical(const EditLog& log, std::ostream& out);
std::string emit_canonical(const EditLog& log);

std::int64_t amount_of_edit(const EditLog& log);

/// Number of Unicode code points in a UTF-8 string.
std::size_t utf8_length(std::string_view text);

struct SummaryRow {
  double min = 0;
  double max = 0;
  double mean = 0;
  double stddev = 0;  // population
};

struct CorpusSummary {
  std::size_t documents = 0;
  SummaryRow authors;
  SummaryRow edits;
  SummaryRow amount_of_edit;
};

/// Throws DataError("empty corpus") when `logs` is empty.
CorpusSummary corpus_summary(std::span<const EditLog> logs);

}  // namespace cetrace
