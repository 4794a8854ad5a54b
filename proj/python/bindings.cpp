#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <sstream>

#include "cetrace/cli.hpp"
#include "cetrace/conflicts.hpp"
#include "cetrace/gap_analysis.hpp"
#include "cetrace/log_model.hpp"
#include "cetrace/render.hpp"
#include "cetrace/report.hpp"
#include "cetrace/stats.hpp"
#include "cetrace/synth.hpp"
#include "cetrace/units.hpp"

namespace py = pybind11;
using namespace cetrace;

namespace {

using LogPtr = std::shared_ptr<EditLog>;

std::vector<EditLog> unwrap(const std::vector<LogPtr>& logs) {
  std::vector<EditLog> out;
  out.reserve(logs.size());
  for (const auto& l : logs) out.push_back(*l);
  return out;
}

std::string json_report(ReportBundle bundle, const std::vector<EditLog>& logs) {
  std::vector<std::string> blobs;
  for (const auto& l : logs) blobs.push_back(emit_canonical(l));
  bundle.metadata.input_digest = input_digest(blobs);
  return emit(bundle, Format::Json);
}

py::dict op_dict(const EditLog& log, const EditOp& op) {
  py::dict d;
  d["ts"] = to_millis(op.ts);
  d["author"] = log.author_name(op.author);
  d["action"] = std::string(to_string(op.action));
  d["pos"] = op.pos;
  d["len"] = op.len;
  d["content"] = op.content ? py::cast(*op.content) : py::none();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Session, cluster and conflict analysis of collaborative editing logs";
  m.attr("__version__") = std::string(kToolVersion);

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);

  py::class_<EditLog, LogPtr>(m, "EditLog")
      .def_readonly("doc_id", &EditLog::doc_id)
      .def_readonly("authors", &EditLog::authors)
      .def("__len__", [](const EditLog& l) { return l.ops.size(); })
      .def("op", [](const EditLog& l, std::size_t i) { return op_dict(l, l.ops.at(i)); })
      .def("ops", [](const EditLog& l) {
        py::list out;
        for (const auto& op : l.ops) out.append(op_dict(l, op));
        return out;
      })
      .def("amount_of_edit", [](const EditLog& l) { return amount_of_edit(l); })
      .def("to_canonical", [](const EditLog& l) { return emit_canonical(l); })
      .def("__repr__", [](const EditLog& l) {
        return "<EditLog " + l.doc_id + ": " + std::to_string(l.ops.size()) + " edits>";
      });

  m.def(
      "parse_canonical",
      [](const std::string& text) {
        auto parsed = parse_canonical(text);
        std::vector<LogPtr> logs;
        for (auto& l : parsed.logs) logs.push_back(std::make_shared<EditLog>(normalize(std::move(l))));
        py::list errors, warnings;
        for (const auto& e : parsed.report.errors) errors.append(py::make_tuple(e.line, e.reason));
        for (const auto& w : parsed.report.warnings) warnings.append(py::make_tuple(w.line, w.reason));
        py::dict report;
        report["records"] = parsed.report.record_count;
        report["errors"] = errors;
        report["warnings"] = warnings;
        return py::make_tuple(logs, report);
      },
      py::arg("text"), "Parse canonical JSON lines; returns (normalized logs, validation report).");

  m.def(
      "segment",
      [](const LogPtr& log, const std::string& gap, const std::string& scope) {
        const auto ns = scope == "doc" ? NormalizeScope::Document : NormalizeScope::Session;
        py::list out;
        for (const auto& s : segment(*log, parse_duration(gap))) {
          const auto st = session_stats(s, ns);
          py::dict d;
          d["index"] = s.index;
          d["first"] = s.first;
          d["edits"] = st.edit_count;
          d["kind"] = std::string(to_string(s.kind));
          d["authors"] = s.author_count;
          d["start_ms"] = to_millis(s.start_ts);
          d["end_ms"] = to_millis(s.end_ts);
          d["normalized_edits"] = st.normalized_edit_count;
          out.append(d);
        }
        return out;
      },
      py::arg("log"), py::arg("gap") = "30s", py::arg("normalize_scope") = "session");

  m.def(
      "mean_ci",
      [](const std::vector<double>& xs, double level) {
        const auto e = mean_ci(xs, level);
        return py::make_tuple(e.mean, e.lo, e.hi, e.degenerate);
      },
      py::arg("samples"), py::arg("level") = 0.99, "Returns (mean, lo, hi, degenerate).");

  m.def(
      "sweep_json",
      [](const std::vector<LogPtr>& logs, const std::vector<std::string>& gaps, unsigned jobs) {
        const auto corpus = unwrap(logs);
        std::vector<Duration> ds;
        for (const auto& g : gaps) ds.push_back(parse_duration(g));
        if (ds.empty()) ds = default_sweep_gaps();
        ReportBundle b;
        SweepOptions opts;
        opts.jobs = jobs;
        b.sweep = sweep(corpus, ds, opts);
        return json_report(std::move(b), corpus);
      },
      py::arg("logs"), py::arg("gaps") = std::vector<std::string>{}, py::arg("jobs") = 1);

  m.def(
      "extdist_json",
      [](const std::vector<LogPtr>& logs, const std::string& gap, bool recommend, double threshold) {
        const auto corpus = unwrap(logs);
        const auto base = parse_duration(gap);
        std::vector<Duration> bounds{base};
        for (auto d : default_interval_bounds()) {
          if (d > base) bounds.push_back(d);
        }
        ReportBundle b;
        HistogramSection s{external_distribution(corpus, base, bounds), std::nullopt};
        if (recommend) s.recommendation = recommend_gap(s.histogram, threshold);
        b.histogram = std::move(s);
        return json_report(std::move(b), corpus);
      },
      py::arg("logs"), py::arg("gap") = "30s", py::arg("recommend") = false, py::arg("threshold") = 0.5);

  m.def(
      "conflicts_json",
      [](const std::vector<LogPtr>& logs, const std::vector<std::string>& windows, const std::string& gap,
         bool strict_def3, unsigned jobs) {
        const auto corpus = unwrap(logs);
        std::vector<Window> ws;
        for (const auto& w : windows) ws.push_back(parse_window(w));
        if (ws.empty()) ws = default_windows();
        ReportBundle b;
        SurveyOptions opts{{strict_def3}, 0.99, jobs};
        for (const auto& w : ws) b.conflicts.push_back(conflict_survey(corpus, w, parse_duration(gap), opts));
        return json_report(std::move(b), corpus);
      },
      py::arg("logs"), py::arg("windows") = std::vector<std::string>{}, py::arg("gap") = "30s",
      py::arg("strict_def3") = false, py::arg("jobs") = 1);

  m.def(
      "render_svg",
      [](const LogPtr& log, const std::string& gap, const std::string& window, double width, double height) {
        return render_svg(build_scene(*log, parse_duration(gap), parse_window(window)), width, height);
      },
      py::arg("log"), py::arg("gap") = "300s", py::arg("window") = "300s,400c", py::arg("width") = 960.0,
      py::arg("height") = 540.0);

  m.def(
      "synth_fixture",
      [](std::uint64_t seed, std::size_t sessions, std::size_t plants) {
        auto result = generate(fixture_config(seed, sessions, plants));
        std::ostringstream truth;
        write_truth(result.truth, result.log.doc_id, truth);
        return py::make_tuple(std::make_shared<EditLog>(std::move(result.log)), truth.str());
      },
      py::arg("seed"), py::arg("sessions") = 3, py::arg("plants") = 1,
      "Returns (log, ground-truth JSON line).");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs ce-trace in process; returns (exit code, stdout, stderr).");
}
