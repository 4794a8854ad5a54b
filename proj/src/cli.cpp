#include "cetrace/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "cetrace/conflicts.hpp"
#include "cetrace/gap_analysis.hpp"
#include "cetrace/log_model.hpp"
#include "cetrace/oracle.hpp"
#include "cetrace/parallel.hpp"
#include "cetrace/render.hpp"
#include "cetrace/report.hpp"
#include "cetrace/sharelatex.hpp"
#include "cetrace/synth.hpp"
#include "cetrace/units.hpp"

namespace cetrace {

namespace fs = std::filesystem;

namespace {

struct RunConfig {
  std::vector<std::string> inputs;
  std::string gap;
  std::vector<std::string> gaps;
  std::vector<std::string> windows;
  std::vector<std::string> intervals;
  std::string format = "csv";
  std::string out_dir;
  unsigned jobs = 1;
  std::uint64_t seed = 1;
  bool strict_def3 = false;
  std::string normalize_scope = "session";
  std::string cas_scope = "cas";
  bool recommend = false;
  double threshold = 0.5;
  std::string ci_gap;
  double level = 0.99;
  std::size_t docs = 1;
  std::size_t selftest_docs = 1000;
  std::size_t sessions = 3;
  std::size_t plants = 1;
  std::string kind = "fixture";
  double width = 960;
  double height = 540;
  std::string doc;
};

unsigned default_jobs() {
  if (const char* env = std::getenv("CE_TRACE_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw DataError("cannot read " + path.string());
  return buf.str();
}

std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs, std::string_view ext) {
  if (inputs.empty()) throw UsageError("no input files given");
  std::vector<fs::path> files;
  for (const auto& item : inputs) {
    const fs::path p(item);
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == ext) found.push_back(entry.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::exists(p, ec)) {
      files.push_back(p);
    } else {
      throw DataError("cannot read " + item);
    }
  }
  return files;
}

struct Corpus {
  std::vector<EditLog> logs;
  ValidationReport report;
  std::vector<std::string> blobs;
};

Corpus load_corpus(const std::vector<std::string>& inputs) {
  Corpus corpus;
  const auto files = expand_inputs(inputs, ".jsonl");
  std::map<std::string, std::size_t> slot;
  for (const auto& file : files) {
    corpus.blobs.push_back(read_file(file));
    auto parsed = parse_canonical(corpus.blobs.back());
    auto& r = corpus.report;
    r.record_count += parsed.report.record_count;
    const std::string prefix = files.size() > 1 ? file.filename().string() + ": " : "";
    for (auto issue : parsed.report.errors) {
      issue.reason = prefix + issue.reason;
      r.errors.push_back(std::move(issue));
    }
    for (auto issue : parsed.report.warnings) {
      issue.reason = prefix + issue.reason;
      r.warnings.push_back(std::move(issue));
    }
    for (auto& log : parsed.logs) {
      auto [it, fresh] = slot.try_emplace(log.doc_id, corpus.logs.size());
      if (fresh) {
        corpus.logs.push_back(std::move(log));
        continue;
      }
      auto& target = corpus.logs[it->second];
      for (auto op : log.ops) {
        op.author = target.intern(log.author_name(op.author));
        op.seq = target.ops.size();
        target.ops.push_back(std::move(op));
      }
    }
  }
  for (auto& log : corpus.logs) log = normalize(std::move(log));
  corpus.report.docs.clear();
  for (const auto& log : corpus.logs) {
    corpus.report.docs.push_back({log.doc_id, log.authors.size(), log.ops.size(), amount_of_edit(log)});
  }
  return corpus;
}

void require_clean(const Corpus& corpus) {
  const auto& errs = corpus.report.errors;
  if (!errs.empty()) {
    throw DataError("input has " + std::to_string(errs.size()) + " malformed record(s); first at line " +
                    std::to_string(errs.front().line) + ": " + errs.front().reason);
  }
  if (corpus.logs.empty()) throw DataError("empty corpus");
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::vector<Duration> durations_of(const std::vector<std::string>& items) {
  std::vector<Duration> out;
  for (const auto& item : items) {
    for (auto d : parse_duration_list(item)) out.push_back(d);
  }
  return out;
}

std::vector<Window> windows_of(const std::vector<std::string>& items) {
  std::vector<Window> out;
  for (const auto& item : items) {
    for (const auto& w : parse_window_list(item)) out.push_back(w);
  }
  return out;
}

std::string labels(const std::vector<Duration>& ds) {
  std::vector<std::string> parts;
  for (auto d : ds) parts.push_back(duration_label(d));
  return join(parts, ",");
}

std::string safe_name(std::string_view id) {
  std::string s;
  for (char c : id) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    s += ok ? c : '_';
  }
  if (s.empty() || s == "." || s == "..") s = "doc";
  return s;
}

class Sink {
 public:
  Sink(std::string dir, std::ostream& out) : dir_(std::move(dir)), out_(out) {}

  bool to_dir() const { return !dir_.empty(); }

  void write(const std::string& name, const std::string& text) {
    if (!to_dir()) {
      out_ << text;
      out_.flush();
      if (!out_) throw DataError("failed to write output");
      return;
    }
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw DataError("cannot create " + dir_ + ": " + ec.message());
    const auto path = fs::path(dir_) / name;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    f.close();
    if (!f) throw DataError("cannot write " + path.string());
  }

 private:
  std::string dir_;
  std::ostream& out_;
};

class Runner {
 public:
  Runner(const RunConfig& cfg, std::ostream& out, std::ostream& err)
      : cfg_(cfg), sink_(cfg.out_dir, out), out_(out), err_(err) {}

  int validate() {
    const auto corpus = load_corpus(cfg_.inputs);
    auto bundle = bundle_for(corpus, {});
    bundle.validation = corpus.report;
    write_report("validate", bundle);
    return corpus.report.accepted() ? 0 : 2;
  }

  int summary() {
    const auto corpus = load_corpus(cfg_.inputs);
    require_clean(corpus);
    auto bundle = bundle_for(corpus, {});
    bundle.summary = corpus_summary(corpus.logs);
    write_report("summary", bundle);
    return 0;
  }

  int segment_docs() {
    const auto corpus = load_corpus(cfg_.inputs);
    require_clean(corpus);
    const auto gap = base_gap();
    const auto scope = normalize_scope();
    auto bundle = bundle_for(corpus, {{"gap", duration_label(gap)},
                                      {"normalize_scope", cfg_.normalize_scope}});
    SessionListing listing{gap, {}};
    for (const auto& log : corpus.logs) {
      for (const auto& s : segment(log, gap)) {
        const auto st = session_stats(s, scope);
        listing.rows.push_back({s.doc_id, s.index, s.kind, to_millis(s.start_ts), to_millis(s.end_ts),
                                st.edit_count, s.author_count, st.normalized_edit_count});
      }
    }
    bundle.sessions = std::move(listing);
    write_report("segment", bundle);
    return 0;
  }

  int sweep_gaps() {
    const auto corpus = load_corpus(cfg_.inputs);
    require_clean(corpus);
    const auto gaps = cfg_.gaps.empty() ? default_sweep_gaps() : durations_of(cfg_.gaps);
    SweepOptions opts{normalize_scope(), cas_scope(), cfg_.level, cfg_.jobs};
    std::vector<std::pair<std::string, std::string>> params{
        {"gaps", labels(gaps)},
        {"normalize_scope", cfg_.normalize_scope},
        {"cas_scope", cfg_.cas_scope},
        {"level", fmt_level(cfg_.level)}};
    if (!cfg_.ci_gap.empty()) params.emplace_back("ci_gap", duration_label(parse_duration(cfg_.ci_gap)));
    auto bundle = bundle_for(corpus, std::move(params));
    bundle.sweep = sweep(corpus.logs, gaps, opts);
    if (!cfg_.ci_gap.empty()) {
      bundle.internal_by_doc =
          internal_distance_by_doc(corpus.logs, parse_duration(cfg_.ci_gap), 0.90, cfg_.jobs);
    }
    write_report("sweep", bundle);
    return 0;
  }

  int extdist() {
    const auto corpus = load_corpus(cfg_.inputs);
    require_clean(corpus);
    const auto gap = base_gap();
    std::vector<Duration> bounds;
    if (cfg_.intervals.empty()) {
      bounds.push_back(gap);
      for (auto b : default_interval_bounds()) {
        if (b > gap) bounds.push_back(b);
      }
    } else {
      bounds = durations_of(cfg_.intervals);
    }
    validate_bounds(gap, bounds);
    if (!(cfg_.threshold > 0 && cfg_.threshold <= 1)) throw UsageError("--threshold must be in (0, 1]");
    std::vector<std::pair<std::string, std::string>> params{{"gap", duration_label(gap)},
                                                            {"intervals", labels(bounds)}};
    if (cfg_.recommend) params.emplace_back("threshold", fmt_level(cfg_.threshold));
    auto bundle = bundle_for(corpus, std::move(params));
    HistogramSection section{external_distribution(corpus.logs, gap, bounds, cfg_.jobs), std::nullopt};
    if (cfg_.recommend) section.recommendation = recommend_gap(section.histogram, cfg_.threshold);
    bundle.histogram = std::move(section);
    write_report("extdist", bundle);
    return 0;
  }

  int conflicts() {
    const auto corpus = load_corpus(cfg_.inputs);
    require_clean(corpus);
    const auto gap = base_gap();
    const auto windows = cfg_.windows.empty() ? default_windows() : windows_of(cfg_.windows);
    std::vector<std::string> names;
    for (const auto& w : windows) names.push_back(to_string(w));
    auto bundle = bundle_for(corpus, {{"gap", duration_label(gap)},
                                      {"windows", join(names, ";")},
                                      {"strict_def3", cfg_.strict_def3 ? "true" : "false"},
                                      {"level", fmt_level(cfg_.level)}});
    SurveyOptions opts{{cfg_.strict_def3}, cfg_.level, cfg_.jobs};
    for (const auto& w : windows) bundle.conflicts.push_back(conflict_survey(corpus.logs, w, gap, opts));
    write_report("conflicts", bundle);
    return 0;
  }

  int render() {
    const auto corpus = load_corpus(cfg_.inputs);
    require_clean(corpus);
    const auto gap = cfg_.gap.empty() ? Duration{300'000} : parse_duration(cfg_.gap);
    const auto windows = cfg_.windows.empty() ? std::vector<Window>{kFigureWindow} : windows_of(cfg_.windows);
    if (windows.size() != 1) throw UsageError("render takes a single --window");
    if (!sink_.to_dir() && corpus.logs.size() > 1) {
      throw UsageError("render of several documents needs --out DIR");
    }
    const auto svgs = parallel_map<std::string>(corpus.logs.size(), cfg_.jobs, [&](std::size_t i) {
      return render_svg(build_scene(corpus.logs[i], gap, windows.front()), cfg_.width, cfg_.height);
    });
    for (std::size_t i = 0; i < svgs.size(); ++i) sink_.write(safe_name(corpus.logs[i].doc_id) + ".svg", svgs[i]);
    return 0;
  }

  int synth() {
    if (cfg_.kind != "fixture" && cfg_.kind != "property") {
      throw UsageError("--kind must be fixture or property");
    }
    for (std::size_t d = 0; d < cfg_.docs; ++d) {
      const auto seed = cfg_.seed + d;
      std::vector<Window> windows = cfg_.windows.empty() ? std::vector<Window>{} : windows_of(cfg_.windows);
      SynthConfig config = cfg_.kind == "property"
                               ? random_property_config(seed)
                               : fixture_config(seed, cfg_.sessions, cfg_.plants,
                                                windows.empty() ? Window{Duration{30'000}, 10} : windows.front());
      const auto result = generate(config);
      const auto name = safe_name(result.log.doc_id);
      sink_.write(name + ".jsonl", emit_canonical(result.log));
      if (sink_.to_dir()) {
        std::ostringstream truth;
        write_truth(result.truth, result.log.doc_id, truth);
        sink_.write(name + ".truth.json", truth.str());
      }
    }
    return 0;
  }

  int selftest() {
    const auto windows = cfg_.windows.empty() ? default_windows() : windows_of(cfg_.windows);
    const auto report = oracle::run_equivalence(cfg_.seed, cfg_.selftest_docs, windows);
    out_ << "documents " << report.documents << ", sessions " << report.sessions << ", cases "
         << report.cases << "\n";
    out_ << "mismatches: segment " << report.segment_mismatches << ", clusterize "
         << report.cluster_mismatches << ", conflicts " << report.conflict_mismatches << "\n";
    for (const auto& f : report.first_failures) err_ << "mismatch: " << f << "\n";
    out_ << (report.mismatches() == 0 ? "selftest passed\n" : "selftest FAILED\n");
    return report.mismatches() == 0 ? 0 : 2;
  }

  int import_sharelatex() {
    const auto files = expand_inputs(cfg_.inputs, ".json");
    for (const auto& file : files) {
      const auto fallback = cfg_.doc.empty() ? file.stem().string() : cfg_.doc;
      const auto result = cetrace::import_sharelatex(read_file(file), fallback);
      for (const auto& w : result.warnings) {
        err_ << file.string() << ":" << w.line << ": warning: " << w.reason << "\n";
      }
      if (result.skipped_components > 0) {
        err_ << file.string() << ": skipped " << result.skipped_components << " op component(s)\n";
      }
      for (const auto& log : result.logs) sink_.write(safe_name(log.doc_id) + ".jsonl", emit_canonical(log));
    }
    return 0;
  }

 private:
  static std::string fmt_level(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
  }

  Duration base_gap() const { return cfg_.gap.empty() ? Duration{30'000} : parse_duration(cfg_.gap); }

  NormalizeScope normalize_scope() const {
    if (cfg_.normalize_scope == "session") return NormalizeScope::Session;
    if (cfg_.normalize_scope == "doc") return NormalizeScope::Document;
    throw UsageError("--normalize-scope must be session or doc");
  }

  CasAverageScope cas_scope() const {
    if (cfg_.cas_scope == "cas") return CasAverageScope::CasDocs;
    if (cfg_.cas_scope == "all") return CasAverageScope::AllDocs;
    throw UsageError("--cas-scope must be cas or all");
  }

  ReportBundle bundle_for(const Corpus& corpus, std::vector<std::pair<std::string, std::string>> params) {
    ReportBundle b;
    b.metadata.parameters = std::move(params);
    b.metadata.input_digest = input_digest(corpus.blobs);
    return b;
  }

  void write_report(const std::string& name, const ReportBundle& bundle) {
    const auto format = parse_format(cfg_.format);
    sink_.write(name + "." + std::string(extension(format)), emit(bundle, format));
  }

  const RunConfig& cfg_;
  Sink sink_;
  std::ostream& out_;
  std::ostream& err_;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  cfg.jobs = default_jobs();

  CLI::App app{"Session, cluster and conflict analysis of collaborative editing logs", "ce-trace"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  auto inputs = [&](CLI::App* sub) {
    sub->add_option("inputs", cfg.inputs, "Log files or directories of *.jsonl files")->required();
  };
  auto output = [&](CLI::App* sub) {
    sub->add_option("--format", cfg.format, "Output format")
        ->check(CLI::IsMember({"csv", "json", "md", "markdown"}));
    sub->add_option("--out", cfg.out_dir, "Write files into this directory instead of stdout");
  };
  auto jobs = [&](CLI::App* sub) {
    sub->add_option("--jobs", cfg.jobs, "Parallel documents (default: $CE_TRACE_JOBS)")
        ->check(CLI::PositiveNumber);
  };
  auto gap = [&](CLI::App* sub, const char* help) { sub->add_option("--gap", cfg.gap, help); };
  auto windows = [&](CLI::App* sub) {
    sub->add_option("--window,--windows", cfg.windows, "Time-position windows such as 30s,10c")
        ->allow_extra_args(false);
  };
  auto normalize = [&](CLI::App* sub) {
    sub->add_option("--normalize-scope", cfg.normalize_scope, "Author count dividing CAS edit counts")
        ->check(CLI::IsMember({"session", "doc"}));
  };

  auto* validate = app.add_subcommand("validate", "Check canonical logs and report per-document counts");
  inputs(validate);
  output(validate);

  auto* summary = app.add_subcommand("summary", "Corpus overview: authors, edits, amount of edit");
  inputs(summary);
  output(summary);

  auto* segment = app.add_subcommand("segment", "List the sessions of every document at one gap");
  inputs(segment);
  output(segment);
  gap(segment, "Maximum time gap (default 30s)");
  normalize(segment);

  auto* sweep = app.add_subcommand("sweep", "Segmentation statistics over a ladder of gaps");
  inputs(sweep);
  output(sweep);
  jobs(sweep);
  normalize(sweep);
  sweep->add_option("--gaps", cfg.gaps, "Gaps to sweep (default 15mn,7mn,5mn,2mn,1mn,30s)")
      ->allow_extra_args(false);
  sweep->add_option("--cas-scope", cfg.cas_scope, "Documents averaged in CAS-count rows")
      ->check(CLI::IsMember({"cas", "all"}));
  sweep->add_option("--ci-gap", cfg.ci_gap, "Also report per-document internal-distance CI90 at this gap");
  sweep->add_option("--level", cfg.level, "Confidence level")->check(CLI::IsMember({0.90, 0.95, 0.99}));

  auto* extdist = app.add_subcommand("extdist", "External-distance distribution at a base gap");
  inputs(extdist);
  output(extdist);
  jobs(extdist);
  gap(extdist, "Base gap (default 30s)");
  extdist->add_option("--intervals", cfg.intervals, "Interval lower bounds (default 30s,...,900s)")
      ->allow_extra_args(false);
  extdist->add_flag("--recommend", cfg.recommend, "Recommend a gap from the cumulative coverage");
  extdist->add_option("--threshold", cfg.threshold, "Coverage threshold for --recommend (default 0.5)");

  auto* conflicts = app.add_subcommand("conflicts", "Border and insertion conflict tables");
  inputs(conflicts);
  output(conflicts);
  jobs(conflicts);
  gap(conflicts, "Segmentation gap (default 30s)");
  windows(conflicts);
  conflicts->add_flag("--strict-def3", cfg.strict_def3, "Only accept X' between X and Y in X-to-Y direction");
  conflicts->add_option("--level", cfg.level, "Confidence level")->check(CLI::IsMember({0.90, 0.95, 0.99}));

  auto* render = app.add_subcommand("render", "Time-position SVG figure per document");
  inputs(render);
  render->add_option("--out", cfg.out_dir, "Directory for <doc>.svg files");
  jobs(render);
  gap(render, "Segmentation gap (default 300s)");
  windows(render);
  render->add_option("--width", cfg.width, "Canvas width")->check(CLI::PositiveNumber);
  render->add_option("--height", cfg.height, "Canvas height")->check(CLI::PositiveNumber);

  auto* synth = app.add_subcommand("synth", "Generate seeded synthetic logs with ground truth");
  synth->add_option("--out", cfg.out_dir, "Directory for <doc>.jsonl and <doc>.truth.json");
  synth->add_option("--seed", cfg.seed, "First seed");
  synth->add_option("--docs", cfg.docs, "Number of documents");
  synth->add_option("--sessions", cfg.sessions, "Co-author sessions per fixture document")
      ->check(CLI::PositiveNumber);
  synth->add_option("--plants", cfg.plants, "Planted conflicts per fixture document");
  synth->add_option("--kind", cfg.kind, "fixture (banded, planted) or property (random mixed)")
      ->check(CLI::IsMember({"fixture", "property"}));
  windows(synth);

  auto* selftest = app.add_subcommand("selftest", "Cross-check the analyses against brute-force oracles");
  selftest->add_option("--seed", cfg.seed, "First seed");
  selftest->add_option("--docs", cfg.selftest_docs, "Number of random documents (default 1000)");
  windows(selftest);

  auto* importer =
      app.add_subcommand("import-sharelatex", "Convert ShareLaTeX update exports to canonical logs");
  importer->add_option("inputs", cfg.inputs, "Export files (*.json) or directories")->required();
  importer->add_option("--out", cfg.out_dir, "Directory for <doc>.jsonl files");
  importer->add_option("--doc", cfg.doc, "Document id for updates without doc_id");

  if (args.empty()) {
    err << app.help();
    return 1;
  }
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    Runner run(cfg, out, err);
    if (*validate) return run.validate();
    if (*summary) return run.summary();
    if (*segment) return run.segment_docs();
    if (*sweep) return run.sweep_gaps();
    if (*extdist) return run.extdist();
    if (*conflicts) return run.conflicts();
    if (*render) return run.render();
    if (*synth) return run.synth();
    if (*selftest) return run.selftest();
    if (*importer) return run.import_sharelatex();
  } catch (const UsageError& e) {
    err << "ce-trace: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    err << "ce-trace: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "ce-trace: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace cetrace
