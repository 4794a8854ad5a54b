#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cetrace/log_model.hpp"
#include "cetrace/segmentation.hpp"
#include "cetrace/stats.hpp"

namespace cetrace {

/// Which documents feed the CAS-only averages of a sweep row.
enum class CasAverageScope {
  CasDocs,  // only documents with at least one CAS
  AllDocs,  // every document; a doc without CASs counts as zero CASs
};

struct SweepOptions {
  NormalizeScope normalize = NormalizeScope::Session;
  CasAverageScope cas_scope = CasAverageScope::CasDocs;
  double level = 0.99;
  unsigned jobs = 1;
};

/// 15mn, 7mn, 5mn, 2mn, 1mn, 30s.
std::vector<Duration> default_sweep_gaps();

/// 30s, 60s, 120s, 180s, 240s, 300s, 420s, 900s.
std::vector<Duration> default_interval_bounds();

/// Per-document figures behind one sweep row. Averages are over the
/// document's sessions of the given kind; empty when it has none.
struct DocGapStats {
  std::string doc_id;
  std::size_t ops = 0;
  std::size_t sas_count = 0;
  std::size_t cas_count = 0;
  std::size_t sas_ops = 0;
  std::size_t cas_ops = 0;
  std::optional<double> sas_internal_mean;  // seconds
  std::optional<double> cas_internal_mean;
  std::optional<double> sas_length_mean;  // seconds
  std::optional<double> cas_length_mean;
  std::optional<double> sas_edits_mean;
  std::optional<double> cas_edits_mean;
  std::optional<double> cas_normalized_edits_mean;
};

DocGapStats doc_gap_stats(const EditLog& log, Duration gap, NormalizeScope normalize);

struct GapSweepRow {
  Duration gap{};
  std::size_t total_docs = 0;
  std::size_t docs_with_cas = 0;
  double docs_with_cas_proportion = 0;

  std::optional<double> cas_per_doc_avg;
  std::optional<double> cas_proportion_of_sessions;  // per-doc share, averaged
  std::optional<IntervalEstimate> sas_internal;      // seconds
  std::optional<IntervalEstimate> cas_internal;
  std::optional<double> sas_length_avg;  // seconds
  std::optional<double> cas_length_avg;
  std::optional<double> sas_edits_avg;
  std::optional<double> cas_edits_avg;
  std::optional<double> cas_normalized_edits_avg;

  std::size_t sas_sessions = 0;
  std::size_t cas_sessions = 0;
  std::size_t sas_ops = 0;
  std::size_t cas_ops = 0;
  std::size_t total_ops = 0;
};

/// One row per gap, in the given order. Throws DataError for an empty corpus
/// and UsageError for non-positive or repeated gaps.
std::vector<GapSweepRow> sweep(std::span<const EditLog> corpus, std::span<const Duration> gaps,
                               const SweepOptions& options = {});

struct DocHistogram {
  std::string doc_id;
  std::size_t distances = 0;
  std::vector<double> proportions;
};

/// Interval i is [bounds[i], bounds[i + 1]); the last one is [bounds.back(), inf).
struct ExternalDistanceHistogram {
  Duration base_gap{};
  std::vector<Duration> bounds;
  std::vector<DocHistogram> docs;  // only documents with >= 1 external distance
  std::size_t excluded_docs = 0;
  std::vector<double> mean_proportions;
};

/// Throws UsageError unless bounds are strictly increasing and start at base_gap.
void validate_bounds(Duration base_gap, std::span<const Duration> bounds);

std::size_t interval_of(std::span<const Duration> bounds, Duration distance);

/// Share of `distances` falling in each interval. All zeros when empty.
std::vector<double> bin_distances(std::span<const Duration> distances,
                                  std::span<const Duration> bounds);

ExternalDistanceHistogram external_distribution(std::span<const EditLog> corpus, Duration base_gap,
                                                std::span<const Duration> bounds,
                                                unsigned jobs = 1);

struct GapRecommendation {
  Duration gap{};
  std::size_t interval = 0;
  // Threshold reached only in the unbounded last interval; `gap` is then
  // that interval's lower bound.
  bool open_ended = false;
  double threshold = 0.5;
  std::vector<double> coverage;
  std::vector<double> cumulative;
};

/// Upper bound of the first interval at which cumulative corpus-average
/// coverage reaches `threshold`. Throws DataError for an empty histogram.
GapRecommendation recommend_gap(const ExternalDistanceHistogram& histogram,
                                double threshold = 0.5);

struct DocInternalEstimate {
  std::string doc_id;
  std::optional<IntervalEstimate> internal;  // seconds, SAS and CAS pooled
};

struct InternalByDoc {
  Duration gap{};
  double level = 0.90;
  std::vector<DocInternalEstimate> docs;
  std::optional<double> overall_mean;  // mean of the per-doc means
};

/// Per-document internal-distance interval at one gap.
InternalByDoc internal_distance_by_doc(std::span<const EditLog> corpus, Duration gap,
                                       double level = 0.90, unsigned jobs = 1);

}  // namespace cetrace
