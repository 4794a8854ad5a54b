#include "cetrace/oracle.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

#include "cetrace/synth.hpp"

namespace cetrace::oracle {

std::vector<Session> segment(const EditLog& log, Duration gap) {
  if (gap <= Duration::zero()) throw UsageError("segmentation gap must be positive");
  std::vector<Session> out;
  std::vector<std::set<std::string>> names;
  for (std::size_t i = 0; i < log.ops.size(); ++i) {
    const auto& op = log.ops[i];
    if (i == 0 || op.ts - log.ops[i - 1].ts >= gap) {
      Session s;
      s.doc_id = log.doc_id;
      s.index = out.size();
      s.first = i;
      s.start_ts = op.ts;
      s.doc_author_count = log.authors.size();
      out.push_back(s);
      names.emplace_back();
    }
    Session& s = out.back();
    s.ops = std::span<const EditOp>(log.ops).subspan(s.first, i - s.first + 1);
    s.end_ts = op.ts;
    names.back().insert(log.authors[op.author.value]);
    s.author_count = names.back().size();
    s.kind = s.author_count > 1 ? SessionKind::CAS : SessionKind::SAS;
  }
  return out;
}

std::vector<std::vector<std::size_t>> clusterize(const Session& session, const Window& window) {
  const auto n = session.ops.size();
  std::vector<std::vector<bool>> link(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto dt = session.ops[i].ts - session.ops[j].ts;
      const auto dp = session.ops[i].pos - session.ops[j].pos;
      link[i][j] = (dt < window.t && -dt < window.t) && (dp < window.p && -dp < window.p);
    }
  }
  std::vector<bool> seen(n, false);
  std::vector<std::vector<std::size_t>> components;
  for (std::size_t start = 0; start < n; ++start) {
    if (seen[start]) continue;
    std::vector<std::size_t> comp;
    std::deque<std::size_t> queue{start};
    seen[start] = true;
    while (!queue.empty()) {
      const auto u = queue.front();
      queue.pop_front();
      comp.push_back(u);
      for (std::size_t v = 0; v < n; ++v) {
        if (link[u][v] && !seen[v]) {
          seen[v] = true;
          queue.push_back(v);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    components.push_back(std::move(comp));
  }
  return components;
}

namespace {

struct View {
  const Session& s;

  Timestamp ts(std::size_t i) const { return s.ops[i].ts; }
  std::int64_t pos(std::size_t i) const { return s.ops[i].pos; }
  AuthorId author(std::size_t i) const { return s.ops[i].author; }

  // Consecutive entries strictly later in the session's total order and
  // strictly closer than t in time.
  bool time_ordered(const std::vector<std::size_t>& seq, Duration t) const {
    for (std::size_t k = 1; k < seq.size(); ++k) {
      if (seq[k] <= seq[k - 1]) return false;
      if (!(ts(seq[k]) - ts(seq[k - 1]) < t)) return false;
    }
    return true;
  }

  bool position_ordered(const std::vector<std::size_t>& seq, std::int64_t p) const {
    for (std::size_t k = 1; k < seq.size(); ++k) {
      if (!(pos(seq[k]) > pos(seq[k - 1]))) return false;
      if (!(pos(seq[k]) - pos(seq[k - 1]) < p)) return false;
    }
    return true;
  }
};

std::int64_t distance(std::int64_t a, std::int64_t b) { return a < b ? b - a : a - b; }

}  // namespace

std::vector<Case> conflicts(const Session& session, const Window& window,
                            const ConflictOptions& options) {
  const auto n = session.ops.size();
  if (n > kMaxSessionOps) throw DataError("oracle bound exceeded");
  const View v{session};
  std::vector<Case> out;

  for (std::size_t x = 0; x + 1 < n; ++x) {
    const std::size_t y = x + 1;
    if (v.author(x) == v.author(y)) continue;
    Case c{CaseKind::Border, {x, y}, std::nullopt, Outcome::Consider};
    if (y + 1 < n) c.x_prime = y + 1;
    const bool close =
        v.ts(y) - v.ts(x) < window.t && distance(v.pos(x), v.pos(y)) < window.p;
    if (close) {
      c.outcome = Outcome::Potential;
      if (c.x_prime) {
        const auto xp = *c.x_prime;
        const bool member = v.author(xp) == v.author(x) || v.author(xp) == v.author(y);
        const bool between = v.position_ordered({x, xp, y}, window.p) ||
                             (!options.strict_def3 && v.position_ordered({y, xp, x}, window.p));
        if (member && v.time_ordered({x, y, xp}, window.t) && between) {
          c.outcome = Outcome::Conflict;
        }
      }
    }
    out.push_back(std::move(c));
  }

  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 2; b < n; ++b) {
      bool pure = v.author(a + 1) != v.author(a);
      for (std::size_t k = a + 1; k < b && pure; ++k) pure = v.author(k) == v.author(a + 1);
      if (!pure) break;
      if (v.author(b) != v.author(a)) continue;

      std::vector<std::size_t> block;
      for (std::size_t k = a + 1; k < b; ++k) block.push_back(k);
      if (block.size() > kMaxBlock) throw DataError("oracle bound exceeded");

      Case c{CaseKind::Insertion, {}, std::nullopt, Outcome::Consider};
      c.members.push_back(a);
      c.members.insert(c.members.end(), block.begin(), block.end());
      c.members.push_back(b);
      if (b + 1 < n) c.x_prime = b + 1;

      bool witness = false;
      for (std::uint32_t mask = 1; mask < (1U << block.size()) && !witness; ++mask) {
        std::vector<std::size_t> subset;
        for (std::size_t k = 0; k < block.size(); ++k) {
          if (mask & (1U << k)) subset.push_back(block[k]);
        }
        std::stable_sort(subset.begin(), subset.end(),
                         [&](std::size_t i, std::size_t j) { return v.pos(i) < v.pos(j); });
        std::vector<std::size_t> forward{a}, backward{b};
        forward.insert(forward.end(), subset.begin(), subset.end());
        backward.insert(backward.end(), subset.begin(), subset.end());
        forward.push_back(b);
        backward.push_back(a);
        witness = v.position_ordered(forward, window.p) || v.position_ordered(backward, window.p);
      }

      if (v.time_ordered(c.members, window.t) && witness) {
        c.outcome = Outcome::Potential;
        if (c.x_prime) {
          const auto xp = *c.x_prime;
          const bool member = v.author(xp) == v.author(a) || v.author(xp) == v.author(a + 1);
          const auto lo = std::min(v.pos(a), v.pos(b));
          const auto hi = std::max(v.pos(a), v.pos(b));
          if (member && v.time_ordered({b, xp}, window.t) && v.pos(xp) > lo && v.pos(xp) < hi) {
            c.outcome = Outcome::Conflict;
          }
        }
      }
      out.push_back(std::move(c));
      break;
    }
  }
  return out;
}

std::vector<Case> as_cases(const SessionConflicts& found) {
  std::vector<Case> out;
  for (const auto& c : found.border) {
    Case o{CaseKind::Border, {c.x.index, c.y.index}, std::nullopt, c.outcome};
    if (c.x_prime) o.x_prime = c.x_prime->index;
    out.push_back(std::move(o));
  }
  for (const auto& c : found.insertion) {
    Case o{CaseKind::Insertion, {c.x1.index}, std::nullopt, c.outcome};
    for (const auto& y : c.y_block) o.members.push_back(y.index);
    o.members.push_back(c.x2.index);
    if (c.x_prime) o.x_prime = c.x_prime->index;
    out.push_back(std::move(o));
  }
  return out;
}

namespace {

bool same_sessions(const std::vector<Session>& a, const std::vector<Session>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].first != b[i].first || a[i].ops.size() != b[i].ops.size() || a[i].kind != b[i].kind ||
        a[i].author_count != b[i].author_count || a[i].start_ts != b[i].start_ts ||
        a[i].end_ts != b[i].end_ts) {
      return false;
    }
  }
  return true;
}

}  // namespace

EquivalenceReport run_equivalence(std::uint64_t first_seed, std::size_t documents,
                                  const std::vector<Window>& windows) {
  EquivalenceReport report;
  auto fail = [&](std::string what) {
    if (report.first_failures.size() < 10) report.first_failures.push_back(std::move(what));
  };

  for (std::size_t d = 0; d < documents; ++d) {
    const auto seed = first_seed + d;
    const auto config = random_property_config(seed);
    const auto log = generate(config).log;
    ++report.documents;

    for (const auto gap : {config.gap, Duration{10'000}, Duration{300'000}}) {
      if (!same_sessions(cetrace::segment(log, gap), oracle::segment(log, gap))) {
        ++report.segment_mismatches;
        fail("segment seed=" + std::to_string(seed) + " gap=" + std::to_string(gap.count()) + "ms");
      }
    }

    for (const auto& session : cetrace::segment(log, config.gap)) {
      ++report.sessions;
      for (const auto& window : windows) {
        std::vector<std::vector<std::size_t>> fast;
        for (const auto& c : cetrace::clusterize(session, window)) fast.push_back(c.members);
        if (fast != oracle::clusterize(session, window)) {
          ++report.cluster_mismatches;
          fail("clusterize seed=" + std::to_string(seed) + " session=" +
               std::to_string(session.index) + " window=" + to_string(window));
        }
        if (session.kind != SessionKind::CAS) continue;
        for (const bool strict : {false, true}) {
          const ConflictOptions opts{strict};
          const auto expected = oracle::conflicts(session, window, opts);
          auto got = as_cases(analyze_session(session, window, opts));
          report.cases += expected.size();
          if (got != expected) {
            ++report.conflict_mismatches;
            fail("conflicts seed=" + std::to_string(seed) + " session=" +
                 std::to_string(session.index) + " window=" + to_string(window) +
                 (strict ? " strict" : ""));
          }
        }
      }
    }
  }
  return report;
}

}  // namespace cetrace::oracle
