#include "cetrace/segmentation.hpp"

#include "cetrace/synth.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace cetrace;
using namespace std::chrono_literals;

TEST_SUITE("segmentation") {
  TEST_CASE("gap rule") {
    auto log = testing::make_log("d", {{0, "a"}, {20'000, "a"}, {100'000, "a"}});
    auto s = segment(log, 30s);
    REQUIRE(s.size() == 2);
    CHECK(s[0].ops.size() == 2);
    CHECK(s[1].ops.size() == 1);
    CHECK(s[1].first == 2);
    CHECK(external_distances(s) == std::vector<Duration>{80s});

    auto edge = testing::make_log("d", {{0, "a"}, {30'000, "a"}});
    CHECK(segment(edge, 30s).size() == 2);
    CHECK(segment(edge, 30001ms).size() == 1);
  }

  TEST_CASE("singleton and empty logs") {
    auto one = testing::make_log("d", {{5, "a"}});
    auto s = segment(one, 30s);
    REQUIRE(s.size() == 1);
    CHECK(s[0].kind == SessionKind::SAS);
    CHECK(external_distances(s).empty());
    const auto st = session_stats(s[0]);
    CHECK(st.internal_distances.empty());
    CHECK(st.length == 0ms);
    CHECK(segment(EditLog{"e", {}, {}}, 30s).empty());
    CHECK_THROWS_AS(segment(one, 0s), UsageError);
  }

  TEST_CASE("three sessions give two external distances") {
    auto log = testing::make_log("d", {{0, "a"}, {40'000, "a"}, {90'000, "b"}});
    auto s = segment(log, 30s);
    auto ext = external_distances(s);
    REQUIRE(ext.size() == 2);
    for (auto d : ext) CHECK(d >= 30s);
  }

  TEST_CASE("session stats") {
    auto one_author = testing::make_log("d", {{0, "a"}, {5'000, "a"}, {12'000, "a"}});
    auto st = session_stats(testing::whole(one_author));
    CHECK(st.internal_distances == std::vector<Duration>{5s, 7s});
    CHECK(st.length == 12s);
    CHECK(st.edit_count == 3);
    CHECK(st.normalized_edit_count == doctest::Approx(3.0));

    auto two = testing::make_log("d", {{0, "a"}, {5'000, "b"}, {12'000, "a"}});
    CHECK(session_stats(testing::whole(two)).normalized_edit_count == doctest::Approx(1.5));
  }

  TEST_CASE("normalize scope document") {
    // Document has three authors, the session only one.
    auto log = testing::make_log("d", {{0, "a"}, {1'000, "a"}, {100'000, "b"}, {200'000, "c"}});
    auto s = segment(log, 30s);
    CHECK(session_stats(s[0], NormalizeScope::Session).normalized_edit_count == doctest::Approx(2.0));
    CHECK(session_stats(s[0], NormalizeScope::Document).normalized_edit_count ==
          doctest::Approx(2.0 / 3.0));
  }

  TEST_CASE("kind follows distinct authors") {
    auto log = testing::make_log("d", {{0, "a"}, {1'000, "b"}, {60'000, "a"}, {61'000, "a"}});
    auto s = segment(log, 30s);
    REQUIRE(s.size() == 2);
    CHECK(s[0].kind == SessionKind::CAS);
    CHECK(s[0].author_count == 2);
    CHECK(s[1].kind == SessionKind::SAS);
    CHECK(s[0].doc_author_count == 2);
  }

  TEST_CASE("partition and coarsening on random logs") {
    const Duration ladder[] = {30s, 60s, 120s, 300s, 420s, 900s};
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
      const auto log = generate(random_property_config(seed)).log;
      std::size_t previous = SIZE_MAX;
      std::vector<std::size_t> previous_starts;
      for (auto gap : ladder) {
        const auto s = segment(log, gap);
        std::size_t covered = 0;
        std::vector<std::size_t> starts;
        for (const auto& x : s) {
          CHECK(x.first == covered);
          covered += x.ops.size();
          starts.push_back(x.first);
        }
        CHECK(covered == log.ops.size());
        CHECK(s.size() <= previous);
        // every coarse boundary is also a fine boundary
        for (auto b : starts) {
          CHECK((previous_starts.empty() ||
                 std::binary_search(previous_starts.begin(), previous_starts.end(), b)));
        }
        previous = s.size();
        previous_starts = starts;
      }
    }
  }
}
