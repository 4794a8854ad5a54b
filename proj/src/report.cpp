#include "cetrace/report.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"

namespace cetrace {

using ojson = nlohmann::ordered_json;

Format parse_format(std::string_view name) {
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  if (name == "md" || name == "markdown") return Format::Markdown;
  throw UsageError("unknown format '" + std::string(name) + "' (expected csv, json or md)");
}

std::string_view extension(Format format) {
  switch (format) {
    case Format::Csv:
      return "csv";
    case Format::Json:
      return "json";
    case Format::Markdown:
      return "md";
  }
  return "txt";
}

std::string duration_label(Duration d) {
  const auto ms = d.count();
  if (ms % 60'000 == 0) return std::to_string(ms / 60'000) + "mn";
  if (ms % 1000 == 0) return std::to_string(ms / 1000) + "s";
  return std::to_string(ms) + "ms";
}

std::string input_digest(const std::vector<std::string>& blobs) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (const auto& blob : blobs) {
    for (char c : blob) mix(static_cast<unsigned char>(c));
    mix(0xff);  // blob separator
  }
  return fmt::format("fnv1a64:{:016x}", h);
}

// ---------------------------------------------------------------------------
// Cell formatting

namespace {

std::string seconds_label(Duration d) {
  const auto ms = d.count();
  return ms % 1000 == 0 ? std::to_string(ms / 1000) + "s" : std::to_string(ms) + "ms";
}

std::string num(double x) {
  auto s = fmt::format("{:.2f}", x);
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string pct(double x) { return num(100.0 * x) + "%"; }

template <class T, class Fn>
std::string or_na(const std::optional<T>& v, Fn&& fn) {
  return v ? fn(*v) : std::string("NA");
}

std::string interval(const IntervalEstimate& e, double scale, std::string_view unit) {
  if (e.degenerate) return "[NA]";
  // Bounds sitting on a clamp limit print bare: "[0-5.04%]", "[88.96-100%]".
  auto bound = [&](double v) {
    if (v == 0.0) return std::string("0");
    if (unit == "%" && v == 100.0) return std::string("100");
    return num(v);
  };
  return "[" + bound(e.lo * scale) + "-" + bound(e.hi * scale) + std::string(unit) + "]";
}

std::string level_label(double level) { return fmt::format("CI {:.0f}%", level * 100.0); }

std::string window_label(const Window& w) {
  return "[" + seconds_label(w.t) + ", " + std::to_string(w.p) + "c]";
}

std::string window_id(const Window& w) {
  return seconds_label(w.t) + "_" + std::to_string(w.p) + "c";
}

std::string interval_label(std::span<const Duration> bounds, std::size_t i) {
  const auto lo = seconds_label(bounds[i]);
  const auto hi = i + 1 < bounds.size() ? seconds_label(bounds[i + 1]) : std::string();
  return "[" + lo + "," + hi + ")";
}

Table metadata_table(const ReportMetadata& m) {
  Table t{"metadata", "Metadata", {"key", "value"}, {}};
  t.rows.push_back({"tool_version", m.tool_version});
  t.rows.push_back({"input_digest", m.input_digest});
  for (const auto& [k, v] : m.parameters) t.rows.push_back({k, v});
  return t;
}

void validation_tables(const ValidationReport& v, std::vector<Table>& out) {
  Table issues{"validation", "Validation (" + std::to_string(v.record_count) + " records, " +
                                 std::to_string(v.errors.size()) + " errors, " +
                                 std::to_string(v.warnings.size()) + " warnings)",
               {"line", "severity", "reason"}, {}};
  for (const auto& e : v.errors) issues.rows.push_back({std::to_string(e.line), "error", e.reason});
  for (const auto& w : v.warnings) {
    issues.rows.push_back({std::to_string(w.line), "warning", w.reason});
  }
  out.push_back(std::move(issues));

  Table docs{"validation_docs", "Documents", {"doc", "authors", "edits", "amount_of_edit"}, {}};
  for (const auto& d : v.docs) {
    docs.rows.push_back({d.doc_id, std::to_string(d.authors), std::to_string(d.edits),
                         std::to_string(d.amount_of_edit)});
  }
  out.push_back(std::move(docs));
}

Table summary_table(const CorpusSummary& s) {
  Table t{"summary", "Overview of the data: " + std::to_string(s.documents) + " documents",
          {"", "Min", "Max", "Average", "Std"}, {}};
  auto row = [&](const char* label, const SummaryRow& r) {
    t.rows.push_back({label, num(r.min), num(r.max), num(r.mean), num(r.stddev)});
  };
  row("No. of authors", s.authors);
  row("No. of edits", s.edits);
  row("Amount of edit", s.amount_of_edit);
  return t;
}

Table sessions_table(const SessionListing& s) {
  Table t{"sessions",
          "Sessions (maximum time gap " + duration_label(s.gap) + ")",
          {"doc", "session", "kind", "start_ms", "end_ms", "length", "edits", "authors",
           "normalized_edits"},
          {}};
  for (const auto& r : s.rows) {
    t.rows.push_back({r.doc_id, std::to_string(r.index), std::string(to_string(r.kind)),
                      std::to_string(r.start_ms), std::to_string(r.end_ms),
                      num(static_cast<double>(r.end_ms - r.start_ms) / 1000.0) + "s",
                      std::to_string(r.edits), std::to_string(r.authors), num(r.normalized_edits)});
  }
  return t;
}

Table sweep_table(const std::vector<GapSweepRow>& rows) {
  Table t{"sweep", "Documents segmentation by maximum time gap", {""}, {}};
  for (const auto& r : rows) t.columns.push_back(duration_label(r.gap));
  const std::string ci = rows.empty() || !rows.front().sas_internal
                             ? level_label(0.99)
                             : level_label(rows.front().sas_internal->level);

  auto add = [&](std::string label, auto&& cell) {
    std::vector<std::string> row{std::move(label)};
    for (const auto& r : rows) row.push_back(cell(r));
    t.rows.push_back(std::move(row));
  };
  auto secs = [](double v) { return num(v) + "s"; };
  add("Doc having CASs", [](const GapSweepRow& r) {
    return std::to_string(r.docs_with_cas) + "/" + std::to_string(r.total_docs);
  });
  add("Doc having CASs: Proportion", [](const GapSweepRow& r) { return pct(r.docs_with_cas_proportion); });
  add("No. of CASs per doc: Average", [](const GapSweepRow& r) { return or_na(r.cas_per_doc_avg, num); });
  add("No. of CASs per doc: Proportion",
      [](const GapSweepRow& r) { return or_na(r.cas_proportion_of_sessions, pct); });
  add("Internal-distance: SASs (Average)",
      [&](const GapSweepRow& r) { return or_na(r.sas_internal, [&](auto e) { return secs(e.mean); }); });
  add("Internal-distance: SASs (" + ci + ")", [](const GapSweepRow& r) {
    return or_na(r.sas_internal, [](auto e) { return interval(e, 1.0, ""); });
  });
  add("Internal-distance: CASs (Average)",
      [&](const GapSweepRow& r) { return or_na(r.cas_internal, [&](auto e) { return secs(e.mean); }); });
  add("Internal-distance: CASs (" + ci + ")", [](const GapSweepRow& r) {
    return or_na(r.cas_internal, [](auto e) { return interval(e, 1.0, ""); });
  });
  add("Session length: SASs (Average)", [&](const GapSweepRow& r) { return or_na(r.sas_length_avg, secs); });
  add("Session length: CASs (Average)", [&](const GapSweepRow& r) { return or_na(r.cas_length_avg, secs); });
  add("No. of edits: SASs (Average)", [](const GapSweepRow& r) { return or_na(r.sas_edits_avg, num); });
  add("No. of edits: CASs (Average)", [](const GapSweepRow& r) { return or_na(r.cas_edits_avg, num); });
  add("No. of edits: CASs (Normalized)",
      [](const GapSweepRow& r) { return or_na(r.cas_normalized_edits_avg, num); });
  return t;
}

Table internal_table(const InternalByDoc& d) {
  const auto ci = level_label(d.level);
  Table t{"internal_by_doc",
          "Average internal-distance per document (maximum time gap " + duration_label(d.gap) +
              ", " + ci + ")",
          {"doc", "Average", ci, "n"},
          {}};
  for (const auto& e : d.docs) {
    t.rows.push_back({e.doc_id, or_na(e.internal, [](auto x) { return num(x.mean) + "s"; }),
                      or_na(e.internal, [](auto x) { return interval(x, 1.0, "s"); }),
                      e.internal ? std::to_string(e.internal->n) : std::string("0")});
  }
  t.rows.push_back({"All documents", or_na(d.overall_mean, [](double m) { return num(m) + "s"; }),
                    "", std::to_string(d.docs.size())});
  return t;
}

void histogram_tables(const HistogramSection& s, std::vector<Table>& out) {
  const auto& h = s.histogram;
  Table dist{"extdist",
             "External-distances distribution (maximum time gap " + duration_label(h.base_gap) +
                 ", " + std::to_string(h.docs.size()) + " documents)",
             {"Interval", "Average", "Cumulative"},
             {}};
  double running = 0;
  for (std::size_t i = 0; i < h.bounds.size(); ++i) {
    running += h.mean_proportions[i];
    dist.rows.push_back({interval_label(h.bounds, i), pct(h.mean_proportions[i]), pct(running)});
  }
  out.push_back(std::move(dist));

  Table docs{"extdist_docs", "External-distances per document", {"doc", "distances"}, {}};
  for (std::size_t i = 0; i < h.bounds.size(); ++i) docs.columns.push_back(interval_label(h.bounds, i));
  for (const auto& d : h.docs) {
    std::vector<std::string> row{d.doc_id, std::to_string(d.distances)};
    for (double p : d.proportions) row.push_back(pct(p));
    docs.rows.push_back(std::move(row));
  }
  out.push_back(std::move(docs));

  if (s.recommendation) {
    const auto& r = *s.recommendation;
    Table rec{"extdist_recommendation", "Recommended maximum time gap", {"", "value"}, {}};
    rec.rows.push_back({"Threshold", pct(r.threshold)});
    rec.rows.push_back({"Interval", interval_label(h.bounds, r.interval)});
    rec.rows.push_back({"Cumulative coverage", pct(r.cumulative.at(r.interval))});
    rec.rows.push_back({"Recommended gap", seconds_label(r.gap) + (r.open_ended ? " (open-ended)" : "")});
    out.push_back(std::move(rec));
  }
}

Table conflict_table(const ConflictTable& c) {
  const std::string ci = fmt::format("CI{:.0f}%", c.level * 100.0);
  Table t{"conflicts_" + window_id(c.window),
          "Border conflict and Insertion conflict with " + window_label(c.window) +
              " time-position window (maximum time gap " + duration_label(c.base_gap) + ")" +
              (c.no_cas ? " - no co-author sessions" : ""),
          {"", "Border conflict", "Insertion conflict"},
          {}};
  auto add = [&](std::string label, auto&& cell) {
    if (c.no_cas) {
      t.rows.push_back({std::move(label), "", ""});
    } else {
      t.rows.push_back({std::move(label), cell(c.border), cell(c.insertion)});
    }
  };
  using Col = ConflictColumn;
  add("Proportion of Potential-conflicts over Consider-cases",
      [](const Col& k) { return or_na(k.potential_over_consider, [](auto e) { return pct(e.mean); }); });
  add("Proportion of Potential-conflicts over Consider-cases " + ci, [](const Col& k) {
    return or_na(k.potential_over_consider, [](auto e) { return interval(e, 100.0, "%"); });
  });
  add("Proportion of Conflicts over Potential-conflict",
      [](const Col& k) { return or_na(k.conflict_over_potential, [](auto e) { return pct(e.mean); }); });
  add("Proportion of Conflicts over Potential-conflict " + ci, [](const Col& k) {
    return or_na(k.conflict_over_potential, [](auto e) { return interval(e, 100.0, "%"); });
  });
  add("Average of Time-distance of Conflict cases", [](const Col& k) {
    return or_na(k.conflict_time_distance, [](auto e) { return num(e.mean) + "s"; });
  });
  add("Average of Time-distance of Conflict cases " + ci, [](const Col& k) {
    return or_na(k.conflict_time_distance, [](auto e) { return interval(e, 1.0, "s"); });
  });
  add("Average of Position-distance of Conflict cases", [](const Col& k) {
    return or_na(k.conflict_position_distance, [](auto e) { return num(e.mean) + "c"; });
  });
  add("Average of Position-distance of Conflict cases " + ci, [](const Col& k) {
    return or_na(k.conflict_position_distance, [](auto e) { return interval(e, 1.0, "c"); });
  });
  add("Consider-cases", [](const Col& k) { return std::to_string(k.totals.consider); });
  add("Potential-conflicts", [](const Col& k) { return std::to_string(k.totals.potential); });
  add("Conflicts", [](const Col& k) { return std::to_string(k.totals.conflict); });
  return t;
}

}  // namespace

std::vector<Table> tables(const ReportBundle& b) {
  std::vector<Table> out;
  out.push_back(metadata_table(b.metadata));
  if (b.validation) validation_tables(*b.validation, out);
  if (b.summary) out.push_back(summary_table(*b.summary));
  if (b.sessions) out.push_back(sessions_table(*b.sessions));
  if (b.sweep) out.push_back(sweep_table(*b.sweep));
  if (b.internal_by_doc) out.push_back(internal_table(*b.internal_by_doc));
  if (b.histogram) histogram_tables(*b.histogram, out);
  for (const auto& c : b.conflicts) out.push_back(conflict_table(c));
  return out;
}

// ---------------------------------------------------------------------------
// CSV / Markdown

namespace {

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

void write_csv_row(std::ostringstream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << csv_field(cells[i]);
  }
  out << '\n';
}

std::string render_csv(const std::vector<Table>& ts) {
  std::ostringstream out;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i) out << '\n';
    write_csv_row(out, {ts[i].title});
    write_csv_row(out, ts[i].columns);
    for (const auto& row : ts[i].rows) write_csv_row(out, row);
  }
  return out.str();
}

std::string md_cell(std::string_view s) {
  std::string r;
  for (char c : s) {
    if (c == '|') r += '\\';
    r += c;
  }
  return r;
}

std::string render_markdown(const std::vector<Table>& ts) {
  std::ostringstream out;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i) out << '\n';
    out << "## " << ts[i].title << "\n\n|";
    for (const auto& c : ts[i].columns) out << ' ' << md_cell(c) << " |";
    out << "\n|";
    for (std::size_t k = 0; k < ts[i].columns.size(); ++k) out << (k == 0 ? " --- |" : " ---: |");
    out << '\n';
    for (const auto& row : ts[i].rows) {
      out << '|';
      for (const auto& cell : row) out << ' ' << md_cell(cell) << " |";
      out << '\n';
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// JSON

template <class T, class Fn>
ojson opt(const std::optional<T>& v, Fn&& fn) {
  return v ? fn(*v) : ojson(nullptr);
}

ojson num_or_null(const std::optional<double>& v) {
  return opt(v, [](double x) { return ojson(x); });
}

ojson to_j(const IntervalEstimate& e) {
  return {{"mean", e.mean}, {"lo", e.lo},       {"hi", e.hi},
          {"n", e.n},       {"level", e.level}, {"degenerate", e.degenerate}};
}

ojson ie_or_null(const std::optional<IntervalEstimate>& v) {
  return opt(v, [](const IntervalEstimate& e) { return to_j(e); });
}

ojson to_j(const SummaryRow& r) {
  return {{"min", r.min}, {"max", r.max}, {"mean", r.mean}, {"std", r.stddev}};
}

ojson to_j(const CaseCounts& c) {
  return {{"consider", c.consider}, {"potential", c.potential}, {"conflict", c.conflict}};
}

ojson to_j(const ConflictColumn& c) {
  return {{"totals", to_j(c.totals)},
          {"potential_over_consider", ie_or_null(c.potential_over_consider)},
          {"conflict_over_potential", ie_or_null(c.conflict_over_potential)},
          {"conflict_time_distance_s", ie_or_null(c.conflict_time_distance)},
          {"conflict_position_distance_c", ie_or_null(c.conflict_position_distance)}};
}

ojson to_j(const ReportBundle& b) {
  ojson j;
  ojson params = ojson::object();
  for (const auto& [k, v] : b.metadata.parameters) params[k] = v;
  j["metadata"] = {{"tool_version", b.metadata.tool_version},
                   {"input_digest", b.metadata.input_digest},
                   {"parameters", params}};

  if (b.validation) {
    const auto& v = *b.validation;
    auto issues = [](const std::vector<LineIssue>& list) {
      ojson a = ojson::array();
      for (const auto& i : list) a.push_back({{"line", i.line}, {"reason", i.reason}});
      return a;
    };
    ojson docs = ojson::array();
    for (const auto& d : v.docs) {
      docs.push_back({{"doc", d.doc_id},
                      {"authors", d.authors},
                      {"edits", d.edits},
                      {"amount_of_edit", d.amount_of_edit}});
    }
    j["validation"] = {{"record_count", v.record_count},
                       {"errors", issues(v.errors)},
                       {"warnings", issues(v.warnings)},
                       {"docs", docs}};
  }
  if (b.summary) {
    j["summary"] = {{"documents", b.summary->documents},
                    {"authors", to_j(b.summary->authors)},
                    {"edits", to_j(b.summary->edits)},
                    {"amount_of_edit", to_j(b.summary->amount_of_edit)}};
  }
  if (b.sessions) {
    ojson rows = ojson::array();
    for (const auto& r : b.sessions->rows) {
      rows.push_back({{"doc", r.doc_id},
                      {"index", r.index},
                      {"kind", to_string(r.kind)},
                      {"start_ms", r.start_ms},
                      {"end_ms", r.end_ms},
                      {"edits", r.edits},
                      {"authors", r.authors},
                      {"normalized_edits", r.normalized_edits}});
    }
    j["sessions"] = {{"gap_ms", b.sessions->gap.count()}, {"rows", rows}};
  }
  if (b.sweep) {
    ojson rows = ojson::array();
    for (const auto& r : *b.sweep) {
      rows.push_back({{"gap_ms", r.gap.count()},
                      {"total_docs", r.total_docs},
                      {"docs_with_cas", r.docs_with_cas},
                      {"docs_with_cas_proportion", r.docs_with_cas_proportion},
                      {"cas_per_doc_avg", num_or_null(r.cas_per_doc_avg)},
                      {"cas_proportion_of_sessions", num_or_null(r.cas_proportion_of_sessions)},
                      {"sas_internal_s", ie_or_null(r.sas_internal)},
                      {"cas_internal_s", ie_or_null(r.cas_internal)},
                      {"sas_length_avg_s", num_or_null(r.sas_length_avg)},
                      {"cas_length_avg_s", num_or_null(r.cas_length_avg)},
                      {"sas_edits_avg", num_or_null(r.sas_edits_avg)},
                      {"cas_edits_avg", num_or_null(r.cas_edits_avg)},
                      {"cas_normalized_edits_avg", num_or_null(r.cas_normalized_edits_avg)},
                      {"sas_sessions", r.sas_sessions},
                      {"cas_sessions", r.cas_sessions},
                      {"sas_ops", r.sas_ops},
                      {"cas_ops", r.cas_ops},
                      {"total_ops", r.total_ops}});
    }
    j["sweep"] = rows;
  }
  if (b.internal_by_doc) {
    const auto& d = *b.internal_by_doc;
    ojson docs = ojson::array();
    for (const auto& e : d.docs) docs.push_back({{"doc", e.doc_id}, {"internal_s", ie_or_null(e.internal)}});
    j["internal_by_doc"] = {{"gap_ms", d.gap.count()},
                            {"level", d.level},
                            {"overall_mean_s", num_or_null(d.overall_mean)},
                            {"docs", docs}};
  }
  if (b.histogram) {
    const auto& h = b.histogram->histogram;
    ojson bounds = ojson::array();
    for (auto d : h.bounds) bounds.push_back(d.count());
    ojson docs = ojson::array();
    for (const auto& d : h.docs) {
      docs.push_back({{"doc", d.doc_id}, {"distances", d.distances}, {"proportions", d.proportions}});
    }
    ojson e = {{"base_gap_ms", h.base_gap.count()},
               {"bounds_ms", bounds},
               {"excluded_docs", h.excluded_docs},
               {"mean_proportions", h.mean_proportions},
               {"docs", docs}};
    e["recommendation"] = opt(b.histogram->recommendation, [](const GapRecommendation& r) {
      return ojson{{"gap_ms", r.gap.count()},     {"interval", r.interval},
                   {"open_ended", r.open_ended},  {"threshold", r.threshold},
                   {"coverage", r.coverage},      {"cumulative", r.cumulative}};
    });
    j["extdist"] = e;
  }
  if (!b.conflicts.empty()) {
    ojson list = ojson::array();
    for (const auto& c : b.conflicts) {
      ojson e = {{"window", {{"t_ms", c.window.t.count()}, {"p", c.window.p}}},
                 {"base_gap_ms", c.base_gap.count()},
                 {"level", c.level},
                 {"documents", c.documents},
                 {"cas_count", c.cas_count},
                 {"no_cas", c.no_cas}};
      if (c.no_cas) e["note"] = "no co-author sessions";
      e["border"] = to_j(c.border);
      e["insertion"] = to_j(c.insertion);
      list.push_back(std::move(e));
    }
    j["conflicts"] = list;
  }
  return j;
}

// Readers

std::optional<double> num_from(const ojson& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

IntervalEstimate ie_from(const ojson& j) {
  IntervalEstimate e;
  e.mean = j.at("mean").get<double>();
  e.lo = j.at("lo").get<double>();
  e.hi = j.at("hi").get<double>();
  e.n = j.at("n").get<std::size_t>();
  e.level = j.at("level").get<double>();
  e.degenerate = j.at("degenerate").get<bool>();
  return e;
}

std::optional<IntervalEstimate> ie_opt(const ojson& j) {
  if (j.is_null()) return std::nullopt;
  return ie_from(j);
}

SummaryRow summary_row_from(const ojson& j) {
  return {j.at("min").get<double>(), j.at("max").get<double>(), j.at("mean").get<double>(),
          j.at("std").get<double>()};
}

ConflictColumn column_from(const ojson& j) {
  ConflictColumn c;
  const auto& t = j.at("totals");
  c.totals = {t.at("consider").get<std::size_t>(), t.at("potential").get<std::size_t>(),
              t.at("conflict").get<std::size_t>()};
  c.potential_over_consider = ie_opt(j.at("potential_over_consider"));
  c.conflict_over_potential = ie_opt(j.at("conflict_over_potential"));
  c.conflict_time_distance = ie_opt(j.at("conflict_time_distance_s"));
  c.conflict_position_distance = ie_opt(j.at("conflict_position_distance_c"));
  return c;
}

ReportBundle from_j(const ojson& j) {
  ReportBundle b;
  const auto& m = j.at("metadata");
  b.metadata.tool_version = m.at("tool_version").get<std::string>();
  b.metadata.input_digest = m.at("input_digest").get<std::string>();
  for (const auto& [k, v] : m.at("parameters").items()) {
    b.metadata.parameters.emplace_back(k, v.get<std::string>());
  }

  if (j.contains("validation")) {
    const auto& v = j.at("validation");
    ValidationReport r;
    r.record_count = v.at("record_count").get<std::size_t>();
    for (const auto& e : v.at("errors")) r.errors.push_back({e.at("line").get<std::size_t>(), e.at("reason").get<std::string>()});
    for (const auto& e : v.at("warnings")) r.warnings.push_back({e.at("line").get<std::size_t>(), e.at("reason").get<std::string>()});
    for (const auto& d : v.at("docs")) {
      r.docs.push_back({d.at("doc").get<std::string>(), d.at("authors").get<std::size_t>(),
                        d.at("edits").get<std::size_t>(), d.at("amount_of_edit").get<std::int64_t>()});
    }
    b.validation = std::move(r);
  }
  if (j.contains("summary")) {
    const auto& s = j.at("summary");
    b.summary = CorpusSummary{s.at("documents").get<std::size_t>(), summary_row_from(s.at("authors")),
                              summary_row_from(s.at("edits")), summary_row_from(s.at("amount_of_edit"))};
  }
  if (j.contains("sessions")) {
    SessionListing l;
    l.gap = Duration{j.at("sessions").at("gap_ms").get<std::int64_t>()};
    for (const auto& r : j.at("sessions").at("rows")) {
      SessionRow row;
      row.doc_id = r.at("doc").get<std::string>();
      row.index = r.at("index").get<std::size_t>();
      row.kind = r.at("kind").get<std::string>() == "CAS" ? SessionKind::CAS : SessionKind::SAS;
      row.start_ms = r.at("start_ms").get<std::int64_t>();
      row.end_ms = r.at("end_ms").get<std::int64_t>();
      row.edits = r.at("edits").get<std::size_t>();
      row.authors = r.at("authors").get<std::size_t>();
      row.normalized_edits = r.at("normalized_edits").get<double>();
      l.rows.push_back(std::move(row));
    }
    b.sessions = std::move(l);
  }
  if (j.contains("sweep")) {
    std::vector<GapSweepRow> rows;
    for (const auto& r : j.at("sweep")) {
      GapSweepRow row;
      row.gap = Duration{r.at("gap_ms").get<std::int64_t>()};
      row.total_docs = r.at("total_docs").get<std::size_t>();
      row.docs_with_cas = r.at("docs_with_cas").get<std::size_t>();
      row.docs_with_cas_proportion = r.at("docs_with_cas_proportion").get<double>();
      row.cas_per_doc_avg = num_from(r.at("cas_per_doc_avg"));
      row.cas_proportion_of_sessions = num_from(r.at("cas_proportion_of_sessions"));
      row.sas_internal = ie_opt(r.at("sas_internal_s"));
      row.cas_internal = ie_opt(r.at("cas_internal_s"));
      row.sas_length_avg = num_from(r.at("sas_length_avg_s"));
      row.cas_length_avg = num_from(r.at("cas_length_avg_s"));
      row.sas_edits_avg = num_from(r.at("sas_edits_avg"));
      row.cas_edits_avg = num_from(r.at("cas_edits_avg"));
      row.cas_normalized_edits_avg = num_from(r.at("cas_normalized_edits_avg"));
      row.sas_sessions = r.at("sas_sessions").get<std::size_t>();
      row.cas_sessions = r.at("cas_sessions").get<std::size_t>();
      row.sas_ops = r.at("sas_ops").get<std::size_t>();
      row.cas_ops = r.at("cas_ops").get<std::size_t>();
      row.total_ops = r.at("total_ops").get<std::size_t>();
      rows.push_back(std::move(row));
    }
    b.sweep = std::move(rows);
  }
  if (j.contains("internal_by_doc")) {
    const auto& d = j.at("internal_by_doc");
    InternalByDoc out;
    out.gap = Duration{d.at("gap_ms").get<std::int64_t>()};
    out.level = d.at("level").get<double>();
    out.overall_mean = num_from(d.at("overall_mean_s"));
    for (const auto& e : d.at("docs")) {
      out.docs.push_back({e.at("doc").get<std::string>(), ie_opt(e.at("internal_s"))});
    }
    b.internal_by_doc = std::move(out);
  }
  if (j.contains("extdist")) {
    const auto& e = j.at("extdist");
    HistogramSection s;
    auto& h = s.histogram;
    h.base_gap = Duration{e.at("base_gap_ms").get<std::int64_t>()};
    for (const auto& v : e.at("bounds_ms")) h.bounds.push_back(Duration{v.get<std::int64_t>()});
    h.excluded_docs = e.at("excluded_docs").get<std::size_t>();
    h.mean_proportions = e.at("mean_proportions").get<std::vector<double>>();
    for (const auto& d : e.at("docs")) {
      h.docs.push_back({d.at("doc").get<std::string>(), d.at("distances").get<std::size_t>(),
                        d.at("proportions").get<std::vector<double>>()});
    }
    if (const auto& r = e.at("recommendation"); !r.is_null()) {
      GapRecommendation rec;
      rec.gap = Duration{r.at("gap_ms").get<std::int64_t>()};
      rec.interval = r.at("interval").get<std::size_t>();
      rec.open_ended = r.at("open_ended").get<bool>();
      rec.threshold = r.at("threshold").get<double>();
      rec.coverage = r.at("coverage").get<std::vector<double>>();
      rec.cumulative = r.at("cumulative").get<std::vector<double>>();
      s.recommendation = std::move(rec);
    }
    b.histogram = std::move(s);
  }
  if (j.contains("conflicts")) {
    for (const auto& e : j.at("conflicts")) {
      ConflictTable c;
      c.window = {Duration{e.at("window").at("t_ms").get<std::int64_t>()},
                  e.at("window").at("p").get<std::int64_t>()};
      c.base_gap = Duration{e.at("base_gap_ms").get<std::int64_t>()};
      c.level = e.at("level").get<double>();
      c.documents = e.at("documents").get<std::size_t>();
      c.cas_count = e.at("cas_count").get<std::size_t>();
      c.no_cas = e.at("no_cas").get<bool>();
      c.border = column_from(e.at("border"));
      c.insertion = column_from(e.at("insertion"));
      b.conflicts.push_back(std::move(c));
    }
  }
  return b;
}

}  // namespace

std::string emit(const ReportBundle& bundle, Format format) {
  if (!bundle.has_sections()) throw DataError("report bundle has no sections");
  if (bundle.summary && bundle.summary->documents == 0) throw DataError("empty corpus");
  switch (format) {
    case Format::Csv:
      return render_csv(tables(bundle));
    case Format::Markdown:
      return render_markdown(tables(bundle));
    case Format::Json:
      return to_j(bundle).dump(2) + "\n";
  }
  return {};
}

std::size_t emit(const ReportBundle& bundle, Format format, std::ostream& sink) {
  const auto text = emit(bundle, format);
  sink.write(text.data(), static_cast<std::streamsize>(text.size()));
  sink.flush();
  if (!sink) throw DataError("failed to write report");
  return text.size();
}

ReportBundle parse_report_json(std::string_view text) {
  try {
    return from_j(ojson::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed report JSON: ") + e.what());
  }
}

}  // namespace cetrace
