#include "cetrace/conflicts.hpp"

#include "cetrace/oracle.hpp"
#include "cetrace/synth.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace cetrace;
using namespace std::chrono_literals;

namespace {

const Window k30{30s, 10};

std::vector<Outcome> border_outcomes(const EditLog& log, const Window& w, ConflictOptions o = {}) {
  std::vector<Outcome> out;
  for (const auto& c : analyze_session(testing::whole(log), w, o).border) out.push_back(c.outcome);
  return out;
}

std::vector<Outcome> insertion_outcomes(const EditLog& log, const Window& w) {
  std::vector<Outcome> out;
  for (const auto& c : analyze_session(testing::whole(log), w).insertion) out.push_back(c.outcome);
  return out;
}

}  // namespace

TEST_SUITE("conflicts") {
  TEST_CASE("border case discovery") {
    auto aabb = testing::make_log("d", {{0, "A"}, {1, "A"}, {2, "B"}, {3, "B"}});
    auto cases = find_border_cases(testing::whole(aabb));
    REQUIRE(cases.size() == 1);
    CHECK(cases[0].x.index == 1);
    CHECK(cases[0].y.index == 2);
    REQUIRE(cases[0].x_prime);
    CHECK(cases[0].x_prime->index == 3);

    auto aba = testing::make_log("d", {{0, "A"}, {1, "B"}, {2, "A"}});
    CHECK(find_border_cases(testing::whole(aba)).size() == 2);
    CHECK_FALSE(find_border_cases(testing::whole(aba))[1].x_prime);

    auto solo = testing::make_log("d", {{0, "A"}, {1, "A"}});
    CHECK_THROWS_AS(find_border_cases(testing::whole(solo)), UsageError);
    CHECK_THROWS_AS(find_insertion_cases(testing::whole(solo)), UsageError);
  }

  TEST_CASE("border evaluation") {
    auto conflict = testing::make_log("d", {{0, "A", 100}, {10'000, "B", 105}, {15'000, "A", 102}});
    CHECK(border_outcomes(conflict, k30).front() == Outcome::Conflict);

    auto outside = testing::make_log("d", {{0, "A", 100}, {10'000, "B", 105}, {15'000, "A", 200}});
    CHECK(border_outcomes(outside, k30).front() == Outcome::Potential);

    auto wide = testing::make_log("d", {{0, "A", 100}, {10'000, "B", 300}});
    CHECK(border_outcomes(wide, k30).front() == Outcome::Consider);

    // Without X' the case stays potential.
    auto two = testing::make_log("d", {{0, "A", 5}, {1'000, "B", 5}});
    CHECK(border_outcomes(two, k30) == std::vector<Outcome>{Outcome::Potential});
  }

  TEST_CASE("border orientation flag") {
    // Y below X: only the mirrored orientation [Y, X', X] holds.
    auto mirrored = testing::make_log("d", {{0, "A", 105}, {10'000, "B", 100}, {15'000, "A", 102}});
    CHECK(border_outcomes(mirrored, k30).front() == Outcome::Conflict);
    CHECK(border_outcomes(mirrored, k30, {true}).front() == Outcome::Potential);
  }

  TEST_CASE("border X' by a third author is not a conflict") {
    auto third = testing::make_log("d", {{0, "A", 100}, {10'000, "B", 105}, {15'000, "C", 102}});
    CHECK(border_outcomes(third, k30).front() == Outcome::Potential);
  }

  TEST_CASE("border X' too late") {
    auto late = testing::make_log("d", {{0, "A", 100}, {10'000, "B", 105}, {40'000, "A", 102}});
    CHECK(border_outcomes(late, k30).front() == Outcome::Potential);
  }

  TEST_CASE("insertion case discovery") {
    auto abbaa = testing::make_log("d", {{0, "A"}, {1, "B"}, {2, "B"}, {3, "A"}, {4, "A"}});
    auto cases = find_insertion_cases(testing::whole(abbaa));
    REQUIRE(cases.size() == 1);
    CHECK(cases[0].x1.index == 0);
    REQUIRE(cases[0].y_block.size() == 2);
    CHECK(cases[0].y_block[0].index == 1);
    CHECK(cases[0].y_block[1].index == 2);
    CHECK(cases[0].x2.index == 3);
    REQUIRE(cases[0].x_prime);
    CHECK(cases[0].x_prime->index == 4);

    auto abca = testing::make_log("d", {{0, "A"}, {1, "B"}, {2, "C"}, {3, "A"}});
    CHECK(find_insertion_cases(testing::whole(abca)).empty());

    auto ab = testing::make_log("d", {{0, "A"}, {1, "B"}});
    CHECK(find_insertion_cases(testing::whole(ab)).empty());
  }

  TEST_CASE("insertion evaluation") {
    auto conflict =
        testing::make_log("d", {{0, "A", 100}, {5'000, "B", 104}, {10'000, "A", 108}, {15'000, "A", 103}});
    CHECK(insertion_outcomes(conflict, k30) == std::vector<Outcome>{Outcome::Conflict});
    const auto c = analyze_session(testing::whole(conflict), k30).insertion.front();
    REQUIRE(c.witness.size() == 1);
    CHECK(c.witness[0].pos == 104);
    CHECK(c.time_distance == 10s);
    CHECK(c.position_distance == 8);

    auto outside =
        testing::make_log("d", {{0, "A", 100}, {5'000, "B", 104}, {10'000, "A", 108}, {15'000, "A", 500}});
    CHECK(insertion_outcomes(outside, k30) == std::vector<Outcome>{Outcome::Potential});

    auto far = testing::make_log("d", {{0, "A", 100}, {5'000, "B", 700}, {10'000, "A", 108}});
    CHECK(insertion_outcomes(far, k30) == std::vector<Outcome>{Outcome::Consider});
  }

  TEST_CASE("insertion witness uses a subset of the block") {
    // Y-block 104, 900, 112: the far edit is skipped, 100 < 104 < 112 < 118 links.
    auto log = testing::make_log("d", {{0, "A", 100},
                                       {2'000, "B", 104},
                                       {4'000, "B", 900},
                                       {6'000, "B", 112},
                                       {8'000, "A", 118},
                                       {9'000, "A", 101}});
    const auto c = analyze_session(testing::whole(log), k30).insertion.front();
    CHECK(c.outcome == Outcome::Conflict);
    CHECK(c.witness.size() == 2);
    // Descending orientation [X2, Y, X1] counts as well.
    auto down = testing::make_log("d", {{0, "A", 118}, {2'000, "B", 112}, {4'000, "B", 104}, {8'000, "A", 100}});
    CHECK(insertion_outcomes(down, k30) == std::vector<Outcome>{Outcome::Potential});
  }

  TEST_CASE("oracle examples agree") {
    auto conflict =
        testing::make_log("d", {{0, "A", 100}, {5'000, "B", 104}, {10'000, "A", 108}, {15'000, "A", 103}});
    const auto s = testing::whole(conflict);
    CHECK(oracle::conflicts(s, k30) == oracle::as_cases(analyze_session(s, k30)));

    auto same = testing::make_log("d", {{0, "A", 7}, {1'000, "B", 7}});
    const auto cases = oracle::conflicts(testing::whole(same), k30);
    REQUIRE(cases.size() == 1);
    CHECK(cases[0].kind == oracle::CaseKind::Border);
  }

  TEST_CASE("oracle bound") {
    EditLog big{"big", {}, {}};
    const auto a = big.intern("A"), b = big.intern("B");
    for (int i = 0; i < 201; ++i) {
      EditOp op;
      op.ts = from_millis(i);
      op.author = i % 2 ? a : b;
      op.seq = static_cast<std::uint64_t>(i);
      big.ops.push_back(op);
    }
    CHECK_THROWS_WITH_AS(oracle::conflicts(testing::whole(big), k30), "oracle bound exceeded", DataError);
  }

  TEST_CASE("survey reduction") {
    // Eight switch points; the planted X(A,0) Y(B,4) X'(A,2) is a conflict and
    // its trailing switch Y->X' is potential; the rest are far apart.
    EditLog log{"d", {}, {}};
    const auto a = log.intern("A"), b = log.intern("B");
    std::int64_t t = 0;
    auto push = [&](AuthorId who, std::int64_t pos, std::int64_t dt) {
      t += dt;
      EditOp op;
      op.ts = from_millis(t);
      op.author = who;
      op.pos = pos;
      op.seq = log.ops.size();
      log.ops.push_back(op);
    };
    push(a, 0, 0);
    push(b, 4, 1'000);
    push(a, 2, 1'000);
    push(a, 5'000, 1'000);
    for (int k = 0; k < 3; ++k) {
      push(b, 10'000 + 1'000 * k, 1'000);
      push(a, 20'000 + 1'000 * k, 1'000);
    }
    const auto stats = doc_conflict_stats(log, k30, 30s);
    CHECK(stats.cas_count == 1);
    CHECK(stats.border.counts.consider == 8);
    CHECK(stats.border.counts.potential == 2);
    CHECK(stats.border.counts.conflict == 1);

    const std::vector<DocConflictStats> docs{stats};
    const auto table = reduce_conflicts(docs, k30, 30s, 0.99);
    CHECK(table.border.totals == stats.border.counts);
    REQUIRE(table.border.potential_over_consider);
    CHECK(table.border.potential_over_consider->mean == doctest::Approx(0.25));
    CHECK(table.border.conflict_over_potential->mean == doctest::Approx(0.5));
    CHECK(table.border.conflict_time_distance->mean == doctest::Approx(1.0));
    CHECK(table.border.conflict_position_distance->mean == doctest::Approx(4.0));
    CHECK_FALSE(table.no_cas);
  }

  TEST_CASE("survey without potential cases leaves the ratio undefined") {
    auto quiet = testing::make_log("d", {{0, "A", 0}, {1'000, "B", 500}});
    auto busy = testing::make_log("e", {{0, "A", 0}, {1'000, "B", 2}});
    std::vector<EditLog> corpus{quiet, busy};
    const auto t = conflict_survey(corpus, k30, 30s);
    CHECK(t.border.potential_over_consider->n == 2);
    // only `busy` has a potential case, and none realized
    REQUIRE(t.border.conflict_over_potential);
    CHECK(t.border.conflict_over_potential->n == 1);
    CHECK_FALSE(t.border.conflict_time_distance);
  }

  TEST_CASE("survey on a corpus without co-author sessions") {
    std::vector<EditLog> corpus{testing::make_log("solo", {{0, "A"}, {1'000, "A"}})};
    const auto t = conflict_survey(corpus, k30, 30s);
    CHECK(t.no_cas);
    CHECK_FALSE(t.border.potential_over_consider);
    CHECK_FALSE(t.insertion.potential_over_consider);
  }

  TEST_CASE("proportion intervals are clamped") {
    std::vector<DocConflictStats> docs;
    for (int i = 0; i < 6; ++i) {
      DocConflictStats d;
      d.doc_id = "d" + std::to_string(i);
      d.cas_count = 1;
      d.border.counts = {20, i == 0 ? 6u : 0u, 0};
      d.insertion.counts = {10, 2, i == 0 ? 1u : 2u};
      docs.push_back(d);
    }
    const auto t = reduce_conflicts(docs, k30, 30s, 0.99);
    CHECK(t.border.potential_over_consider->lo == 0.0);
    CHECK(t.insertion.conflict_over_potential->hi == 1.0);
  }

  TEST_CASE("lattice and window monotonicity on random sessions") {
    const Window ladder[] = {{5s, 3}, {10s, 5}, {30s, 10}, {60s, 20}};
    for (std::uint64_t seed = 500; seed < 560; ++seed) {
      const auto log = generate(random_property_config(seed)).log;
      for (const auto& s : segment(log, 30s)) {
        if (s.kind != SessionKind::CAS) continue;
        std::vector<Outcome> previous;
        for (const auto& w : ladder) {
          const auto r = analyze_session(s, w);
          std::vector<Outcome> now;
          for (const auto& c : r.border) {
            if (c.outcome == Outcome::Conflict) {
              CHECK(c.time_distance < w.t);
              CHECK(c.position_distance < w.p);
            }
            now.push_back(c.outcome);
          }
          for (const auto& c : r.insertion) now.push_back(c.outcome);
          if (!previous.empty()) {
            REQUIRE(previous.size() == now.size());
            for (std::size_t i = 0; i < now.size(); ++i) {
              if (previous[i] != Outcome::Consider) CHECK(now[i] != Outcome::Consider);
            }
          }
          previous = now;
        }
      }
    }
  }
}
