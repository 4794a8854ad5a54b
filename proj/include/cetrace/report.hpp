#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cetrace/conflicts.hpp"
#include "cetrace/gap_analysis.hpp"
#include "cetrace/log_model.hpp"

namespace cetrace {

inline constexpr std::string_view kToolVersion = "ce-trace 0.1.0";

struct ReportMetadata {
  std::string tool_version{kToolVersion};
  std::vector<std::pair<std::string, std::string>> parameters;
  std::string input_digest;

  bool operator==(const ReportMetadata&) const = default;
};

struct SessionRow {
  std::string doc_id;
  std::size_t index = 0;
  SessionKind kind = SessionKind::SAS;
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  std::size_t edits = 0;
  std::size_t authors = 0;
  double normalized_edits = 0;
};

struct SessionListing {
  Duration gap{};
  std::vector<SessionRow> rows;
};

struct HistogramSection {
  ExternalDistanceHistogram histogram;
  std::optional<GapRecommendation> recommendation;
};

/// Everything one CLI run reports. Absent sections are skipped by every
/// emitter; the metadata is always written.
struct ReportBundle {
  ReportMetadata metadata;
  std::optional<ValidationReport> validation;
  std::optional<CorpusSummary> summary;
  std::optional<SessionListing> sessions;
  std::optional<std::vector<GapSweepRow>> sweep;
  std::optional<InternalByDoc> internal_by_doc;
  std::optional<HistogramSection> histogram;
  std::vector<ConflictTable> conflicts;

  bool has_sections() const {
    return validation || summary || sessions || sweep || internal_by_doc || histogram ||
           !conflicts.empty();
  }
};

enum class Format { Csv, Json, Markdown };

Format parse_format(std::string_view name);
std::string_view extension(Format format);

/// A rendered table: every cell already formatted (2 decimals, "%"/"s"/"c"
/// units, "[lo-hi]" intervals, "NA" for undefined).
struct Table {
  std::string id;
  std::string title;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  bool operator==(const Table&) const = default;
};

std::vector<Table> tables(const ReportBundle& bundle);

/// Writes the bundle and returns the byte count. The output is built in
/// memory first, so nothing is written when the bundle is incomplete.
/// Throws DataError for a bundle without sections or a failed write.
std::size_t emit(const ReportBundle& bundle, Format format, std::ostream& sink);
std::string emit(const ReportBundle& bundle, Format format);

/// JSON reader for `emit(..., Format::Json)` output.
ReportBundle parse_report_json(std::string_view text);

/// "15mn", "30s", "1500ms".
std::string duration_label(Duration d);

/// FNV-1a 64 over the given input blobs, hex encoded with an "fnv1a64:" prefix.
std::string input_digest(const std::vector<std::string>& blobs);

}  // namespace cetrace
