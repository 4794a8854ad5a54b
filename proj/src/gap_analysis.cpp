#include "cetrace/gap_analysis.hpp"

#include <algorithm>
#include <set>

#include "cetrace/parallel.hpp"

namespace cetrace {

using namespace std::chrono_literals;

std::vector<Duration> default_sweep_gaps() { return {900s, 420s, 300s, 120s, 60s, 30s}; }

std::vector<Duration> default_interval_bounds() {
  return {30s, 60s, 120s, 180s, 240s, 300s, 420s, 900s};
}

namespace {

struct KindAccumulator {
  double internal_sum = 0;
  std::size_t internal_n = 0;
  double length_sum = 0;
  double edits_sum = 0;
  double normalized_sum = 0;
  std::size_t sessions = 0;
  std::size_t ops = 0;

  void add(const Session& s, NormalizeScope normalize) {
    const auto st = session_stats(s, normalize);
    for (auto d : st.internal_distances) internal_sum += to_seconds(d);
    internal_n += st.internal_distances.size();
    length_sum += to_seconds(st.length);
    edits_sum += static_cast<double>(st.edit_count);
    normalized_sum += st.normalized_edit_count;
    ++sessions;
    ops += st.edit_count;
  }

  std::optional<double> internal_mean() const {
    if (internal_n == 0) return std::nullopt;
    return internal_sum / static_cast<double>(internal_n);
  }
  std::optional<double> per_session(double sum) const {
    if (sessions == 0) return std::nullopt;
    return sum / static_cast<double>(sessions);
  }
};

std::optional<double> mean_if_any(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  return mean_of(v);
}

std::optional<IntervalEstimate> ci_if_any(const std::vector<double>& v, double level) {
  if (v.empty()) return std::nullopt;
  return clamp_nonnegative(mean_ci(v, level));
}

void validate_gaps(std::span<const Duration> gaps) {
  std::set<Duration> seen;
  for (auto g : gaps) {
    if (g <= Duration::zero()) throw UsageError("sweep gaps must be positive");
    if (!seen.insert(g).second) throw UsageError("sweep gaps must be distinct");
  }
}

}  // namespace

DocGapStats doc_gap_stats(const EditLog& log, Duration gap, NormalizeScope normalize) {
  KindAccumulator sas, cas;
  for (const auto& s : segment(log, gap)) {
    (s.kind == SessionKind::CAS ? cas : sas).add(s, normalize);
  }
  DocGapStats d;
  d.doc_id = log.doc_id;
  d.ops = log.ops.size();
  d.sas_count = sas.sessions;
  d.cas_count = cas.sessions;
  d.sas_ops = sas.ops;
  d.cas_ops = cas.ops;
  d.sas_internal_mean = sas.internal_mean();
  d.cas_internal_mean = cas.internal_mean();
  d.sas_length_mean = sas.per_session(sas.length_sum);
  d.cas_length_mean = cas.per_session(cas.length_sum);
  d.sas_edits_mean = sas.per_session(sas.edits_sum);
  d.cas_edits_mean = cas.per_session(cas.edits_sum);
  d.cas_normalized_edits_mean = cas.per_session(cas.normalized_sum);
  return d;
}

std::vector<GapSweepRow> sweep(std::span<const EditLog> corpus, std::span<const Duration> gaps,
                               const SweepOptions& options) {
  if (corpus.empty()) throw DataError("empty corpus");
  validate_gaps(gaps);

  std::vector<GapSweepRow> rows;
  for (const auto gap : gaps) {
    const auto docs = parallel_map<DocGapStats>(corpus.size(), options.jobs, [&](std::size_t i) {
      return doc_gap_stats(corpus[i], gap, options.normalize);
    });

    GapSweepRow row;
    row.gap = gap;
    row.total_docs = docs.size();
    std::vector<double> cas_counts, cas_shares, sas_internal, cas_internal;
    std::vector<double> sas_length, cas_length, sas_edits, cas_edits, cas_normalized;
    for (const auto& d : docs) {
      row.sas_sessions += d.sas_count;
      row.cas_sessions += d.cas_count;
      row.sas_ops += d.sas_ops;
      row.cas_ops += d.cas_ops;
      row.total_ops += d.ops;

      const bool has_cas = d.cas_count > 0;
      if (has_cas) ++row.docs_with_cas;
      if (d.sas_internal_mean) sas_internal.push_back(*d.sas_internal_mean);
      if (d.cas_internal_mean) cas_internal.push_back(*d.cas_internal_mean);
      if (d.sas_length_mean) sas_length.push_back(*d.sas_length_mean);
      if (d.sas_edits_mean) sas_edits.push_back(*d.sas_edits_mean);

      const auto sessions = d.sas_count + d.cas_count;
      if (has_cas) {
        cas_counts.push_back(static_cast<double>(d.cas_count));
        cas_shares.push_back(static_cast<double>(d.cas_count) / static_cast<double>(sessions));
        cas_length.push_back(*d.cas_length_mean);
        cas_edits.push_back(*d.cas_edits_mean);
        cas_normalized.push_back(*d.cas_normalized_edits_mean);
      } else if (options.cas_scope == CasAverageScope::AllDocs && sessions > 0) {
        cas_counts.push_back(0);
        cas_shares.push_back(0);
        cas_length.push_back(0);
        cas_edits.push_back(0);
        cas_normalized.push_back(0);
      }
    }
    row.docs_with_cas_proportion =
        static_cast<double>(row.docs_with_cas) / static_cast<double>(row.total_docs);
    row.cas_per_doc_avg = mean_if_any(cas_counts);
    row.cas_proportion_of_sessions = mean_if_any(cas_shares);
    row.sas_internal = ci_if_any(sas_internal, options.level);
    row.cas_internal = ci_if_any(cas_internal, options.level);
    row.sas_length_avg = mean_if_any(sas_length);
    row.cas_length_avg = mean_if_any(cas_length);
    row.sas_edits_avg = mean_if_any(sas_edits);
    row.cas_edits_avg = mean_if_any(cas_edits);
    row.cas_normalized_edits_avg = mean_if_any(cas_normalized);
    rows.push_back(std::move(row));
  }
  return rows;
}

void validate_bounds(Duration base_gap, std::span<const Duration> bounds) {
  if (bounds.empty()) throw UsageError("interval bounds must not be empty");
  if (bounds.front() != base_gap) throw UsageError("first interval bound must equal the base gap");
  for (std::size_t i = 1; i < bounds.size(); ++i) {
    if (bounds[i] <= bounds[i - 1]) throw UsageError("interval bounds must be strictly increasing");
  }
}

std::size_t interval_of(std::span<const Duration> bounds, Duration distance) {
  if (bounds.empty() || distance < bounds.front()) {
    throw DataError("distance " + std::to_string(distance.count()) +
                    "ms is below the first interval bound");
  }
  const auto it = std::upper_bound(bounds.begin(), bounds.end(), distance);
  return static_cast<std::size_t>(it - bounds.begin()) - 1;
}

std::vector<double> bin_distances(std::span<const Duration> distances,
                                  std::span<const Duration> bounds) {
  std::vector<double> share(bounds.size(), 0.0);
  if (distances.empty()) return share;
  std::vector<std::size_t> counts(bounds.size(), 0);
  for (auto d : distances) ++counts[interval_of(bounds, d)];
  for (std::size_t i = 0; i < counts.size(); ++i) {
    share[i] = static_cast<double>(counts[i]) / static_cast<double>(distances.size());
  }
  return share;
}

ExternalDistanceHistogram external_distribution(std::span<const EditLog> corpus, Duration base_gap,
                                                std::span<const Duration> bounds, unsigned jobs) {
  if (corpus.empty()) throw DataError("empty corpus");
  validate_bounds(base_gap, bounds);

  const auto per_doc = parallel_map<DocHistogram>(corpus.size(), jobs, [&](std::size_t i) {
    const auto distances = external_distances(segment(corpus[i], base_gap));
    return DocHistogram{corpus[i].doc_id, distances.size(), bin_distances(distances, bounds)};
  });

  ExternalDistanceHistogram h;
  h.base_gap = base_gap;
  h.bounds.assign(bounds.begin(), bounds.end());
  h.mean_proportions.assign(bounds.size(), 0.0);
  for (const auto& d : per_doc) {
    if (d.distances == 0) {
      ++h.excluded_docs;
      continue;
    }
    h.docs.push_back(d);
  }
  if (!h.docs.empty()) {
    for (std::size_t k = 0; k < bounds.size(); ++k) {
      double sum = 0;
      for (const auto& d : h.docs) sum += d.proportions[k];
      h.mean_proportions[k] = sum / static_cast<double>(h.docs.size());
    }
  }
  return h;
}

GapRecommendation recommend_gap(const ExternalDistanceHistogram& histogram, double threshold) {
  if (histogram.docs.empty() || histogram.bounds.empty()) {
    throw DataError("empty histogram: no document has two or more sessions");
  }
  if (!(threshold > 0 && threshold <= 1)) throw UsageError("threshold must be in (0, 1]");

  // Corpus averages of per-doc shares can sum to 1 - ulp; compare with slack.
  constexpr double kSlack = 1e-12;
  GapRecommendation rec;
  rec.threshold = threshold;
  rec.coverage = histogram.mean_proportions;
  double running = 0;
  bool found = false;
  for (std::size_t i = 0; i < rec.coverage.size(); ++i) {
    running += rec.coverage[i];
    rec.cumulative.push_back(running);
    if (!found && running + kSlack >= threshold) {
      found = true;
      rec.interval = i;
    }
  }
  if (!found) rec.interval = rec.coverage.size() - 1;
  rec.open_ended = rec.interval + 1 == histogram.bounds.size();
  rec.gap = rec.open_ended ? histogram.bounds.back() : histogram.bounds[rec.interval + 1];
  return rec;
}

InternalByDoc internal_distance_by_doc(std::span<const EditLog> corpus, Duration gap, double level,
                                       unsigned jobs) {
  if (corpus.empty()) throw DataError("empty corpus");
  z_value(level);
  InternalByDoc out;
  out.gap = gap;
  out.level = level;
  out.docs = parallel_map<DocInternalEstimate>(corpus.size(), jobs, [&](std::size_t i) {
    std::vector<double> samples;
    for (const auto& s : segment(corpus[i], gap)) {
      for (auto d : session_stats(s).internal_distances) samples.push_back(to_seconds(d));
    }
    DocInternalEstimate e{corpus[i].doc_id, std::nullopt};
    if (!samples.empty()) e.internal = clamp_nonnegative(mean_ci(samples, level));
    return e;
  });
  std::vector<double> means;
  for (const auto& d : out.docs) {
    if (d.internal) means.push_back(d.internal->mean);
  }
  out.overall_mean = mean_if_any(means);
  return out;
}

}  // namespace cetrace
