#include "cetrace/synth.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <string>

#include "json.hpp"

namespace cetrace {

using namespace std::chrono_literals;

std::string_view to_string(PlantKind kind) {
  return kind == PlantKind::Border ? "border" : "insertion";
}

namespace {

struct PatternOp {
  Duration offset;  // from pattern start
  bool first_author;
  std::int64_t pos;
};

struct Pattern {
  std::vector<PatternOp> ops;
};

Duration plant_step(const PlantDirective& d, Duration gap) {
  if (d.step) return *d.step;
  const auto quarter = d.window.t / 4;
  return std::max(Duration{1}, std::min(quarter, gap / 2));
}

std::int64_t plant_offset(const PlantDirective& d) {
  if (d.offset) return *d.offset;
  return d.kind == PlantKind::Border ? std::max<std::int64_t>(2, d.window.p / 2)
                                     : std::max<std::int64_t>(1, d.window.p / 2);
}

// The pattern each plant emits, anchored at position `q`:
//   border:    X(A, q)  Y(B, q+d)  X'(A, q+d/2)
//   insertion: X1(A, q) Y(B, q+d)  X2(A, q+2d)  X'(A, q+1)
Pattern make_pattern(const PlantDirective& d, Duration gap, std::int64_t q) {
  const auto dt = plant_step(d, gap);
  const auto off = plant_offset(d);
  if (d.window.t <= Duration::zero() || d.window.p <= 0) {
    throw DataError("plant window must be positive");
  }
  if (dt <= Duration::zero() || dt >= d.window.t) {
    throw DataError("plant step " + std::to_string(dt.count()) + "ms violates window time bound " +
                    std::to_string(d.window.t.count()) + "ms");
  }
  if (dt >= gap) throw DataError("plant step must stay below the generation gap");

  Pattern p;
  if (d.kind == PlantKind::Border) {
    if (off < 2 || off >= d.window.p) {
      throw DataError("border plant offset " + std::to_string(off) +
                      " must be in [2, p) for window p=" + std::to_string(d.window.p));
    }
    p.ops = {{Duration{0}, true, q}, {dt, false, q + off}, {2 * dt, true, q + off / 2}};
  } else {
    if (off < 1 || off >= d.window.p) {
      throw DataError("insertion plant offset " + std::to_string(off) +
                      " must be in [1, p) for window p=" + std::to_string(d.window.p));
    }
    p.ops = {{Duration{0}, true, q},
             {dt, false, q + off},
             {2 * dt, true, q + 2 * off},
             {3 * dt, true, q + 1}};
  }
  return p;
}

void validate(const SynthConfig& c) {
  if (c.authors == 0) throw DataError("synth config needs at least one author");
  if (c.gap <= Duration::zero()) throw DataError("generation gap must be positive");
  if (c.session_pause < c.gap) throw DataError("session pause must be >= the generation gap");
  if (c.band_width < 1) throw DataError("band width must be positive");
  for (std::size_t k = 0; k < c.sessions.size(); ++k) {
    const auto& s = c.sessions[k];
    if (s.authors.empty()) throw DataError("session " + std::to_string(k) + " has no authors");
    for (auto a : s.authors) {
      if (a >= c.authors) throw DataError("session " + std::to_string(k) + " names unknown author");
    }
    if (s.ops < s.authors.size()) {
      throw DataError("session " + std::to_string(k) + " has fewer edits than authors");
    }
    if (s.max_step < Duration::zero() || s.max_step >= c.gap) {
      throw DataError("session " + std::to_string(k) + " step must be in [0, gap)");
    }
  }
  for (const auto& d : c.plants) {
    if (c.layout != Layout::Banded) throw DataError("plants require the banded layout");
    if (d.session >= c.sessions.size()) throw DataError("plant names unknown session");
    const auto& authors = c.sessions[d.session].authors;
    const bool two = std::any_of(authors.begin(), authors.end(),
                                 [&](auto a) { return a != authors.front(); });
    if (!two) throw DataError("plant session needs two distinct authors");
  }
}

std::string filler(std::int64_t len, SplitMix64& rng) {
  static constexpr char kLetters[] = "etaoinshrdlu ";
  std::string s;
  for (std::int64_t i = 0; i < len; ++i) s.push_back(kLetters[rng.below(sizeof kLetters - 1)]);
  return s;
}

}  // namespace

SynthResult generate(const SynthConfig& config) {
  validate(config);
  SplitMix64 rng(config.seed);

  std::int64_t max_p = 20;
  for (const auto& d : config.plants) max_p = std::max(max_p, d.window.p);
  const std::int64_t margin = 2 * max_p + 16;
  const std::int64_t stride = std::max(config.band_width, 3 * max_p) + margin;

  SynthResult out;
  out.log.doc_id = config.doc_id;
  out.truth.gap = config.gap;
  std::vector<AuthorId> ids;
  for (std::size_t a = 0; a < config.authors; ++a) {
    ids.push_back(out.log.intern("u" + std::to_string(a)));
  }

  Timestamp now = from_millis(config.start_ms);
  std::int64_t walk = config.band_width / 2;
  std::uint32_t last_author = UINT32_MAX;
  std::size_t run = 0;
  std::size_t plant_slot = 0;

  auto push = [&](std::uint32_t author, std::int64_t pos) {
    EditOp op;
    op.ts = now;
    op.author = ids[author];
    op.action = rng.chance(17, 20) ? Action::Insertion : Action::Deletion;
    op.pos = pos;
    op.len = rng.uniform(1, 4);
    if (config.with_content) op.content = filler(op.len, rng);
    op.seq = out.log.ops.size();
    out.log.ops.push_back(std::move(op));
    run = author == last_author ? run + 1 : 1;
    last_author = author;
  };

  auto background_pos = [&](std::uint32_t author) {
    if (config.layout == Layout::Banded) {
      return static_cast<std::int64_t>(author) * stride + rng.uniform(0, config.band_width - 1);
    }
    if (rng.chance(1, 10)) {
      walk = rng.uniform(0, config.band_width);
    } else {
      walk = std::clamp<std::int64_t>(walk + rng.uniform(-12, 12), 0, config.band_width);
    }
    return walk;
  };

  for (std::size_t k = 0; k < config.sessions.size(); ++k) {
    const auto& plan = config.sessions[k];
    if (k > 0) {
      const auto pause = config.session_pause.count();
      now += Duration{rng.uniform(pause, 4 * pause)};
    }
    out.truth.session_starts.push_back(out.log.ops.size());

    std::vector<std::pair<std::size_t, std::size_t>> plant_at;  // (slot, directive)
    for (std::size_t d = 0; d < config.plants.size(); ++d) {
      if (config.plants[d].session == k) {
        plant_at.emplace_back(static_cast<std::size_t>(rng.uniform(0, plan.ops)), d);
      }
    }
    std::stable_sort(plant_at.begin(), plant_at.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    std::uint32_t author_a = plan.authors.front();
    std::uint32_t author_b = author_a;
    for (auto a : plan.authors) {
      if (a != author_a) {
        author_b = a;
        break;
      }
    }

    bool first_item = true;
    auto advance = [&] {
      if (!first_item) now += Duration{rng.uniform(0, plan.max_step.count())};
      first_item = false;
    };
    auto emit_plant = [&](std::size_t d) {
      const auto& directive = config.plants[d];
      const auto base = static_cast<std::int64_t>(config.authors + plant_slot++) * stride + max_p;
      const auto pattern = make_pattern(directive, config.gap, base);
      advance();
      const auto start = now;
      PlantTruth truth{directive.kind, k, out.log.ops.size(), directive.window, Outcome::Conflict};
      for (const auto& p : pattern.ops) {
        now = start + p.offset;
        push(p.first_author ? author_a : author_b, p.pos);
      }
      out.truth.plants.push_back(truth);
    };

    std::size_t next_plant = 0;
    for (std::size_t i = 0; i <= plan.ops; ++i) {
      while (next_plant < plant_at.size() && plant_at[next_plant].first == i) {
        emit_plant(plant_at[next_plant++].second);
      }
      if (i == plan.ops) break;
      std::uint32_t author;
      if (i < plan.authors.size()) {
        author = plan.authors[i];
      } else {
        author = plan.authors[rng.below(plan.authors.size())];
        if (config.max_author_run > 0 && author == last_author && run >= config.max_author_run &&
            plan.authors.size() > 1) {
          do {
            author = plan.authors[rng.below(plan.authors.size())];
          } while (author == last_author);
        }
      }
      advance();
      push(author, background_pos(author));
    }
  }

  out.log = normalize(std::move(out.log));
  return out;
}

void write_truth(const GroundTruth& truth, const std::string& doc_id, std::ostream& out) {
  nlohmann::ordered_json j;
  j["doc"] = doc_id;
  j["gap_ms"] = truth.gap.count();
  j["session_starts"] = truth.session_starts;
  auto plants = nlohmann::ordered_json::array();
  for (const auto& p : truth.plants) {
    nlohmann::ordered_json e;
    e["kind"] = to_string(p.kind);
    e["session"] = p.session;
    e["first_op"] = p.first_op;
    e["window"] = {{"t_ms", p.window.t.count()}, {"p", p.window.p}};
    e["expected"] = to_string(p.expected);
    plants.push_back(std::move(e));
  }
  j["plants"] = std::move(plants);
  out << j.dump() << '\n';
}

GroundTruth read_truth(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
    GroundTruth t;
    t.gap = Duration{j.at("gap_ms").get<std::int64_t>()};
    t.session_starts = j.at("session_starts").get<std::vector<std::size_t>>();
    for (const auto& e : j.at("plants")) {
      PlantTruth p;
      p.kind = e.at("kind").get<std::string>() == "border" ? PlantKind::Border : PlantKind::Insertion;
      p.session = e.at("session").get<std::size_t>();
      p.first_op = e.at("first_op").get<std::size_t>();
      p.window = {Duration{e.at("window").at("t_ms").get<std::int64_t>()},
                  e.at("window").at("p").get<std::int64_t>()};
      const auto expected = e.at("expected").get<std::string>();
      p.expected = expected == "conflict"    ? Outcome::Conflict
                   : expected == "potential" ? Outcome::Potential
                                             : Outcome::Consider;
      t.plants.push_back(p);
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed ground-truth file: ") + e.what());
  }
}

SynthConfig random_property_config(std::uint64_t seed, std::size_t max_ops) {
  SplitMix64 rng(seed * 0x2545F4914F6CDD1DULL + 0x632BE59BD9B4E019ULL);
  SynthConfig c;
  c.seed = rng();
  c.doc_id = "prop-" + std::to_string(seed);
  c.layout = Layout::Mixed;
  c.authors = static_cast<std::size_t>(rng.uniform(1, 4));
  c.gap = rng.chance(1, 2) ? 30s : 60s;
  c.session_pause = Duration{rng.uniform(c.gap.count(), 1'000'000)};
  c.band_width = rng.uniform(20, 150);
  c.max_author_run = 8;

  const auto sessions = static_cast<std::size_t>(rng.uniform(1, 4));
  std::size_t budget = std::max<std::size_t>(max_ops, 4 * sessions);
  for (std::size_t k = 0; k < sessions; ++k) {
    PlannedSession s;
    const auto wanted = static_cast<std::size_t>(rng.uniform(1, static_cast<std::int64_t>(c.authors)));
    std::vector<std::uint32_t> pool(c.authors);
    for (std::uint32_t a = 0; a < c.authors; ++a) pool[a] = a;
    for (std::size_t i = 0; i < wanted; ++i) {
      const auto j = i + rng.below(pool.size() - i);
      std::swap(pool[i], pool[j]);
      s.authors.push_back(pool[i]);
    }
    // Leave at least four edits for every later session.
    const auto cap = budget - 4 * (sessions - k - 1);
    const auto lo = s.authors.size();
    const auto hi = std::min(cap, std::max(lo, cap / 2 + 1));
    s.ops = static_cast<std::size_t>(
        rng.uniform(static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi)));
    budget -= s.ops;
    static constexpr std::int64_t kSteps[] = {500, 2'000, 5'000, 15'000, 29'999};
    s.max_step = Duration{std::min(kSteps[rng.below(5)], c.gap.count() - 1)};
    c.sessions.push_back(std::move(s));
  }
  return c;
}

}  // namespace cetrace

namespace cetrace {

SynthConfig fixture_config(std::uint64_t seed, std::size_t sessions, std::size_t plants,
                           const Window& window) {
  if (sessions == 0) throw DataError("fixture needs at least one session");
  SplitMix64 rng(seed ^ 0xA0761D6478BD642FULL);
  SynthConfig c;
  c.seed = rng();
  c.doc_id = "fixture-" + std::to_string(seed);
  c.authors = static_cast<std::size_t>(rng.uniform(2, 4));
  c.gap = 30s;
  c.session_pause = 120s;
  c.layout = Layout::Banded;
  c.with_content = true;
  for (std::size_t k = 0; k < sessions; ++k) {
    PlannedSession s;
    const auto first = static_cast<std::uint32_t>(rng.below(c.authors));
    s.authors = {first, static_cast<std::uint32_t>((first + 1 + rng.below(c.authors - 1)) % c.authors)};
    if (c.authors > 2 && rng.chance(1, 3)) {
      for (std::uint32_t a = 0; a < c.authors; ++a) {
        if (std::find(s.authors.begin(), s.authors.end(), a) == s.authors.end()) {
          s.authors.push_back(a);
          break;
        }
      }
    }
    s.ops = static_cast<std::size_t>(rng.uniform(12, 40));
    s.max_step = Duration{rng.uniform(1'000, 8'000)};
    c.sessions.push_back(std::move(s));
  }
  for (std::size_t m = 0; m < plants; ++m) {
    PlantDirective d;
    d.kind = m % 2 == 0 ? PlantKind::Border : PlantKind::Insertion;
    d.session = m % sessions;
    d.window = window;
    c.plants.push_back(d);
  }
  return c;
}

}  // namespace cetrace
