// Prints one PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
// CETRACE_UPDATE_GOLDEN=1 rewrites the golden files instead of comparing.

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cetrace/cli.hpp"
#include "cetrace/conflicts.hpp"
#include "cetrace/gap_analysis.hpp"
#include "cetrace/oracle.hpp"
#include "cetrace/render.hpp"
#include "cetrace/report.hpp"
#include "cetrace/segmentation.hpp"
#include "cetrace/stats.hpp"
#include "cetrace/synth.hpp"
#include "cetrace/units.hpp"

using namespace cetrace;
using namespace std::chrono_literals;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

// 1 --------------------------------------------------------------------------

Verdict oracle_equivalence() {
  Verdict v;
  const auto t0 = Clock::now();
  const auto r = oracle::run_equivalence(1, 1000, default_windows());
  const auto elapsed = seconds_since(t0);
  if (r.mismatches() != 0) v.fail(std::to_string(r.mismatches()) + " mismatches, first: " + r.first_failures.front());
  if (elapsed >= 60) v.fail("took " + std::to_string(elapsed) + "s");
  if (v.ok) {
    v.detail = std::to_string(r.documents) + " docs, " + std::to_string(r.sessions) + " sessions, " +
               std::to_string(r.cases) + " cases in " + std::to_string(elapsed).substr(0, 5) + "s";
  }
  return v;
}

// 2 --------------------------------------------------------------------------

Verdict segmentation_laws() {
  Verdict v;
  const std::vector<Duration> ladder{30s, 60s, 120s, 300s, 420s, 900s};
  std::size_t checked = 0;
  for (std::uint64_t seed = 1; seed <= 500; ++seed) {
    const auto log = generate(random_property_config(seed)).log;
    const auto tag = " seed " + std::to_string(seed);
    std::size_t previous_count = SIZE_MAX;
    bool previous_cas = false;
    for (const auto gap : ladder) {
      const auto sessions = segment(log, gap);
      std::size_t covered = 0;
      bool cas = false;
      for (const auto& s : sessions) {
        if (s.first != covered) v.fail("partition gap" + tag);
        covered += s.ops.size();
        for (auto d : session_stats(s).internal_distances) {
          if (!(d < gap)) v.fail("internal distance >= gap" + tag);
        }
        cas = cas || s.kind == SessionKind::CAS;
      }
      if (covered != log.ops.size()) v.fail("partition does not cover the log" + tag);
      for (auto d : external_distances(sessions)) {
        if (d < gap) v.fail("external distance < gap" + tag);
      }
      if (sessions.size() > previous_count) v.fail("session count increased with the gap" + tag);
      if (previous_cas && !cas) v.fail("CAS document lost a CAS at a larger gap" + tag);
      previous_count = sessions.size();
      previous_cas = cas;
      ++checked;
    }
  }
  if (v.ok) v.detail = std::to_string(checked) + " segmentations";
  return v;
}

// 3 --------------------------------------------------------------------------

bool potential_holds(const Session& s, const oracle::Case& c, const Window& w) {
  auto ts = [&](std::size_t i) { return s.ops[i].ts; };
  auto pos = [&](std::size_t i) { return s.ops[i].pos; };
  if (c.kind == oracle::CaseKind::Border) {
    const auto x = c.members[0], y = c.members[1];
    return ts(y) - ts(x) < w.t && std::abs(pos(y) - pos(x)) < w.p;
  }
  for (std::size_t k = 1; k < c.members.size(); ++k) {
    if (!(ts(c.members[k]) - ts(c.members[k - 1]) < w.t)) return false;
  }
  return true;  // the subset witness is checked by the equivalence run
}

Verdict conflict_lattice() {
  Verdict v;
  const std::vector<Window> ladder{{5s, 3}, {10s, 5}, {30s, 10}, {60s, 20}, {120s, 50}};
  std::size_t cases = 0;
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    const auto config = random_property_config(seed);
    const auto log = generate(config).log;
    for (const auto& s : segment(log, config.gap)) {
      if (s.kind != SessionKind::CAS) continue;
      std::vector<oracle::Case> previous;
      for (const auto& w : ladder) {
        const auto found = oracle::as_cases(analyze_session(s, w));
        for (const auto& c : found) {
          ++cases;
          if (c.outcome != Outcome::Consider && !potential_holds(s, c, w)) v.fail("Potential without window fit");
          if (c.outcome == Outcome::Conflict && !c.x_prime) v.fail("Conflict without X'");
        }
        if (!previous.empty()) {
          if (previous.size() != found.size()) {
            v.fail("case set depends on the window");
          } else {
            for (std::size_t i = 0; i < found.size(); ++i) {
              if (previous[i].members != found[i].members) v.fail("case order depends on the window");
              if (previous[i].outcome != Outcome::Consider && found[i].outcome == Outcome::Consider) {
                v.fail("enlarging the window demoted a Potential-conflict, seed " + std::to_string(seed));
              }
            }
          }
        }
        previous = found;
      }
    }
  }
  if (v.ok) v.detail = std::to_string(cases) + " evaluated cases";
  return v;
}

// 4 --------------------------------------------------------------------------

Verdict planted_truth() {
  Verdict v;
  std::size_t fixtures = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    for (std::size_t k = 1; k <= 5; ++k) {
      for (std::size_t m = 0; m <= 3; ++m) {
        const Window window{30s, 10};
        const auto r = generate(fixture_config(seed * 100 + k * 10 + m, k, m, window));
        const auto tag = " (k=" + std::to_string(k) + ", m=" + std::to_string(m) + ")";
        if (segment(r.log, r.truth.gap).size() != k) v.fail("session count" + tag);
        const auto stats = doc_conflict_stats(r.log, window, r.truth.gap);
        if (stats.border.counts.conflict + stats.insertion.counts.conflict != m) v.fail("conflict count" + tag);
        std::size_t borders = 0;
        for (const auto& p : r.truth.plants) borders += p.kind == PlantKind::Border;
        if (stats.border.counts.conflict != borders) v.fail("border conflicts" + tag);
        ++fixtures;
      }
    }
  }
  if (v.ok) v.detail = std::to_string(fixtures) + " fixtures";
  return v;
}

// 5 --------------------------------------------------------------------------

Verdict statistics() {
  Verdict v;
  const std::vector<double> s{1, 2, 3};
  const auto e = mean_ci(s, 0.99);
  if (std::abs(e.lo - 0.513) > 0.001 || std::abs(e.hi - 3.487) > 0.001) {
    v.fail("mean_ci([1,2,3]) = [" + std::to_string(e.lo) + ", " + std::to_string(e.hi) + "]");
  }

  // Two-sample proportions whose raw intervals cross 0 and 100%.
  ConflictTable t;
  t.window = {30s, 10};
  t.base_gap = 30s;
  t.documents = 2;
  t.cas_count = 2;
  const std::vector<double> low{0.0, 0.0282}, high{1.0, 1.0 - 0.06175};
  const auto raw_low = mean_ci(low, 0.99), raw_high = mean_ci(high, 0.99);
  if (!(raw_low.lo < 0) || !(raw_high.hi > 1)) v.fail("constructed samples do not cross the limits");
  t.border.potential_over_consider = clamp_proportion(raw_low);
  t.border.conflict_over_potential = clamp_proportion(raw_high);
  t.insertion = t.border;
  ReportBundle b;
  b.conflicts.push_back(t);
  const auto table = tables(b).back();
  if (table.rows[1][1] != "[0-5.04%]") v.fail("low cell " + table.rows[1][1]);
  if (table.rows[3][1] != "[88.96-100%]") v.fail("high cell " + table.rows[3][1]);
  if (v.ok) v.detail = "[0.513, 3.487], " + table.rows[1][1] + ", " + table.rows[3][1];
  return v;
}

// 6 --------------------------------------------------------------------------

Verdict histogram() {
  Verdict v;
  const auto bounds = default_interval_bounds();
  const std::vector<Duration> d{45s, 70s, 130s};
  const std::vector<double> expected{1.0 / 3, 1.0 / 3, 1.0 / 3, 0, 0, 0, 0, 0};
  if (bin_distances(d, bounds) != expected) v.fail("[45s,70s,130s] binned wrong");
  if (interval_of(bounds, 60s) != 1) v.fail("60s not in [60s,120s)");

  std::vector<EditLog> corpus;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) corpus.push_back(generate(random_property_config(seed)).log);
  const auto h = external_distribution(corpus, 30s, bounds);
  for (const auto& doc : h.docs) {
    double sum = 0;
    for (double p : doc.proportions) sum += p;
    if (std::abs(sum - 1) > 1e-9) v.fail("proportions of " + doc.doc_id + " sum to " + std::to_string(sum));
  }
  if (h.docs.empty()) v.fail("no document with external distances");
  if (v.ok) v.detail = std::to_string(h.docs.size()) + " documents summed";
  return v;
}

// 7 --------------------------------------------------------------------------

struct Run {
  int code;
  std::string out;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const std::vector<std::string> kSweepRows{
    "Doc having CASs",
    "Doc having CASs: Proportion",
    "No. of CASs per doc: Average",
    "No. of CASs per doc: Proportion",
    "Internal-distance: SASs (Average)",
    "Internal-distance: SASs (CI 99%)",
    "Internal-distance: CASs (Average)",
    "Internal-distance: CASs (CI 99%)",
    "Session length: SASs (Average)",
    "Session length: CASs (Average)",
    "No. of edits: SASs (Average)",
    "No. of edits: CASs (Average)",
    "No. of edits: CASs (Normalized)",
};

const std::vector<std::string> kConflictRows{
    "Proportion of Potential-conflicts over Consider-cases",
    "Proportion of Potential-conflicts over Consider-cases CI99%",
    "Proportion of Conflicts over Potential-conflict",
    "Proportion of Conflicts over Potential-conflict CI99%",
    "Average of Time-distance of Conflict cases",
    "Average of Time-distance of Conflict cases CI99%",
    "Average of Position-distance of Conflict cases",
    "Average of Position-distance of Conflict cases CI99%",
    "Consider-cases",
    "Potential-conflicts",
    "Conflicts",
};

Verdict structural_reproduction() {
  Verdict v;
  const fs::path fixtures = CETRACE_FIXTURES, golden = CETRACE_GOLDEN;
  const bool update = std::getenv("CETRACE_UPDATE_GOLDEN") != nullptr;
  if (update) fs::create_directories(golden);

  struct Job {
    std::string name;
    std::vector<std::string> args;
  };
  const std::vector<Job> jobs{
      {"sweep", {"sweep", fixtures.string()}},
      {"extdist", {"extdist", fixtures.string(), "--recommend"}},
      {"conflicts", {"conflicts", fixtures.string()}},
  };
  std::size_t compared = 0;
  for (const auto& job : jobs) {
    for (const std::string format : {"csv", "json", "md"}) {
      auto args = job.args;
      args.insert(args.end(), {"--format", format});
      auto serial = args, wide = args;
      serial.insert(serial.end(), {"--jobs", "1"});
      wide.insert(wide.end(), {"--jobs", "8"});
      const auto a = cli(serial), b = cli(serial), c = cli(wide);
      const auto file = golden / (job.name + "." + format);
      if (a.code != 0) {
        v.fail(job.name + " exited " + std::to_string(a.code));
        continue;
      }
      if (a.out != b.out) v.fail(job.name + "." + format + " differs across runs");
      if (a.out != c.out) v.fail(job.name + "." + format + " differs between --jobs 1 and 8");
      if (update) {
        std::ofstream(file, std::ios::binary) << a.out;
      } else if (!fs::exists(file) || slurp(file) != a.out) {
        v.fail(file.filename().string() + " does not match the golden file");
      }
      ++compared;

      if (format != "csv") continue;
      auto has_row = [&](const std::string& label) {
        return a.out.find("\n" + label + ",") != std::string::npos ||
               a.out.find("\n\"" + label + "\",") != std::string::npos;
      };
      if (job.name == "sweep") {
        for (const auto& r : kSweepRows) {
          if (!has_row(r)) v.fail("sweep lacks row '" + r + "'");
        }
        if (a.out.find("\n,15mn,7mn,5mn,2mn,1mn,30s\n") == std::string::npos) v.fail("sweep gap columns");
      } else if (job.name == "extdist") {
        for (const char* r : {"[30s,60s)", "[60s,120s)", "[120s,180s)", "[180s,240s)", "[240s,300s)",
                              "[300s,420s)", "[420s,900s)", "[900s,)"}) {
          if (!has_row(r)) v.fail(std::string("extdist lacks interval ") + r);
        }
        if (!has_row("Recommended gap")) v.fail("extdist lacks the recommendation");
      } else {
        for (const char* id : {"[30s, 10c]", "[10s, 5c]", "[60s, 20c]"}) {
          if (a.out.find(id) == std::string::npos) v.fail(std::string("conflicts lacks window ") + id);
        }
        for (const auto& r : kConflictRows) {
          std::size_t n = 0;
          for (auto at = a.out.find("\n" + r + ","); at != std::string::npos; at = a.out.find("\n" + r + ",", at + 1)) ++n;
          if (n != 3) v.fail("conflicts row '" + r + "' appears " + std::to_string(n) + " times");
        }
        if (a.out.find("\n,Border conflict,Insertion conflict\n") == std::string::npos) v.fail("conflict columns");
      }
    }
  }
  if (v.ok) v.detail = std::to_string(compared) + (update ? " golden files written" : " golden files matched");
  return v;
}

// 8 --------------------------------------------------------------------------

Verdict throughput() {
  Verdict v;
  auto config = random_property_config(2024, 100'000);
  config.sessions.clear();
  // Ten long co-author sessions of 10,000 edits each.
  for (int k = 0; k < 10; ++k) {
    PlannedSession s;
    s.authors = {0, 1, 2};
    s.ops = 10'000;
    s.max_step = 5s;
    config.sessions.push_back(s);
  }
  config.authors = std::max<std::size_t>(config.authors, 3);
  const auto text = emit_canonical(generate(config).log);

  const auto t0 = Clock::now();
  auto parsed = parse_canonical(text);
  if (!parsed.report.accepted() || parsed.logs.size() != 1) {
    v.fail("ingest rejected the document");
    return v;
  }
  const auto log = normalize(std::move(parsed.logs.front()));
  const auto ops = log.ops.size();
  const std::vector<EditLog> corpus{log};
  sweep(corpus, default_sweep_gaps());
  std::size_t conflicts = 0;
  for (const auto& w : default_windows()) {
    const auto t = conflict_survey(corpus, w, 30s);
    conflicts += t.border.totals.conflict + t.insertion.totals.conflict;
  }
  const auto elapsed = seconds_since(t0);
  if (ops != 100'000) v.fail("document has " + std::to_string(ops) + " edits");
  if (elapsed >= 5) v.fail("took " + std::to_string(elapsed) + "s");
  if (v.ok) v.detail = std::to_string(ops) + " edits in " + std::to_string(elapsed).substr(0, 5) + "s";
  return v;
}

// 9 --------------------------------------------------------------------------

void count_elements(const boost::property_tree::ptree& node, std::size_t& dots, std::size_t& rects) {
  for (const auto& [name, child] : node) {
    if (name == "circle") ++dots;
    if (name == "rect" && child.get("<xmlattr>.class", "") == "cluster") ++rects;
    count_elements(child, dots, rects);
  }
}

Verdict render_validity() {
  Verdict v;
  std::size_t docs = 0;
  for (const auto& entry : fs::directory_iterator(CETRACE_FIXTURES)) {
    if (entry.path().extension() != ".jsonl") continue;
    auto parsed = parse_canonical(slurp(entry.path()));
    for (auto& raw : parsed.logs) {
      const auto log = normalize(std::move(raw));
      const auto scene = build_scene(log, 300s);
      std::istringstream in(render_svg(scene));
      boost::property_tree::ptree tree;
      try {
        boost::property_tree::read_xml(in, tree);
      } catch (const std::exception& e) {
        v.fail(log.doc_id + ": " + e.what());
        continue;
      }
      std::size_t dots = 0, rects = 0;
      count_elements(tree, dots, rects);
      std::size_t clusters = 0;
      for (const auto& s : segment(log, 300s)) clusters += clusterize(s, kFigureWindow).size();
      if (dots != log.ops.size()) v.fail(log.doc_id + ": dot count");
      if (rects != clusters) v.fail(log.doc_id + ": rectangle count");
      ++docs;
    }
  }
  if (docs == 0) v.fail("no fixture documents");
  if (v.ok) v.detail = std::to_string(docs) + " documents";
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"oracle equivalence", oracle_equivalence},
      {"segmentation laws", segmentation_laws},
      {"conflict lattice", conflict_lattice},
      {"planted truth", planted_truth},
      {"statistics", statistics},
      {"histogram", histogram},
      {"structural reproduction", structural_reproduction},
      {"throughput", throughput},
      {"render validity", render_validity},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.fail(std::string("exception: ") + e.what());
    }
    all = all && v.ok;
    std::cout << (v.ok ? "PASS" : "FAIL") << " " << i + 1 << " " << criteria[i].first << ": " << v.detail
              << std::endl;
  }
  return all ? 0 : 1;
}
