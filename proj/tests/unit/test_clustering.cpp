#include "cetrace/clustering.hpp"

#include "cetrace/oracle.hpp"
#include "cetrace/synth.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace cetrace;
using namespace std::chrono_literals;

namespace {

std::vector<std::vector<std::size_t>> members(const std::vector<Cluster>& cs) {
  std::vector<std::vector<std::size_t>> out;
  for (const auto& c : cs) out.push_back(c.members);
  return out;
}

}  // namespace

TEST_SUITE("clustering") {
  TEST_CASE("window examples") {
    auto near = testing::make_log("d", {{0, "a", 0}, {10'000, "a", 5}});
    CHECK(clusterize(testing::whole(near), {30s, 10}).size() == 1);

    auto far = testing::make_log("d", {{0, "a", 0}, {10'000, "a", 500}});
    CHECK(clusterize(testing::whole(far), {300s, 400}).size() == 2);

    auto chain = testing::make_log("d", {{0, "a", 0}, {20'000, "b", 8}, {40'000, "a", 16}});
    const auto c = clusterize(testing::whole(chain), {30s, 10});
    REQUIRE(c.size() == 1);
    CHECK(c[0].members == std::vector<std::size_t>{0, 1, 2});
    CHECK(c[0].min_pos == 0);
    CHECK(c[0].max_pos == 16);
    CHECK(to_millis(c[0].max_ts) == 40'000);
  }

  TEST_CASE("bounds are exclusive") {
    auto log = testing::make_log("d", {{0, "a", 0}, {30'000, "a", 0}, {30'001, "a", 10}});
    const auto c = clusterize(testing::whole(log), {30s, 10});
    CHECK(members(c) == std::vector<std::vector<std::size_t>>{{0}, {1}, {2}});
  }

  TEST_CASE("links any pair, not just time neighbours") {
    // 0 and 2 are close; 1 sits far away in position between them in time.
    auto log = testing::make_log("d", {{0, "a", 0}, {1'000, "b", 900}, {2'000, "a", 3}});
    const auto c = clusterize(testing::whole(log), {30s, 10});
    CHECK(members(c) == std::vector<std::vector<std::size_t>>{{0, 2}, {1}});
  }

  TEST_CASE("window validation") {
    CHECK_THROWS_AS(validate(Window{0s, 10}), UsageError);
    CHECK_THROWS_AS(validate(Window{1s, 0}), UsageError);
    CHECK(to_string(Window{30s, 10}) == "30s,10c");
  }

  TEST_CASE("matches the brute-force components and is monotone in the window") {
    const Window windows[] = {{5s, 3}, {10s, 5}, {30s, 10}, {60s, 20}, {300s, 400}};
    for (std::uint64_t seed = 100; seed < 160; ++seed) {
      const auto log = generate(random_property_config(seed)).log;
      for (const auto& s : segment(log, 30s)) {
        std::size_t last = SIZE_MAX;
        for (const auto& w : windows) {
          const auto c = clusterize(s, w);
          CHECK(members(c) == oracle::clusterize(s, w));
          std::size_t total = 0;
          for (const auto& k : c) total += k.members.size();
          CHECK(total == s.ops.size());
          CHECK(c.size() <= last);
          last = c.size();
        }
      }
    }
  }
}
