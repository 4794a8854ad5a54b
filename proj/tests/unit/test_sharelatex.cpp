#include "cetrace/sharelatex.hpp"

#include "doctest.h"

using namespace cetrace;

TEST_SUITE("sharelatex") {
  TEST_CASE("array export") {
    const auto r = import_sharelatex(R"([
      {"doc_id": {"$oid": "d1"}, "op": [{"i": "héllo", "p": 4}, {"d": "ab", "p": 9}],
       "meta": {"user_id": "u1", "start_ts": 1000, "end_ts": 2000}},
      {"doc_id": "d1", "op": [{"i": "x", "p": 0}], "meta": {"user_id": "u2", "start_ts": 1500}}
    ])", "fallback");
    CHECK(r.updates == 2);
    REQUIRE(r.logs.size() == 1);
    const auto& log = r.logs[0];
    CHECK(log.doc_id == "d1");
    REQUIRE(log.ops.size() == 3);
    CHECK(to_millis(log.ops[0].ts) == 1500);
    CHECK(log.author_name(log.ops[0].author) == "u2");
    CHECK(log.ops[1].len == 5);
    CHECK(log.ops[1].pos == 4);
    CHECK(to_millis(log.ops[1].ts) == 2000);
    CHECK(log.ops[2].action == Action::Deletion);
    CHECK(is_normalized(log));
  }

  TEST_CASE("lines, fallbacks and skips") {
    const auto r = import_sharelatex(
        "{\"op\": [{\"i\": \"a\", \"p\": 1}, {\"c\": \"note\", \"p\": 2}], \"meta\": {\"end_ts\": 5}}\n"
        "\n"
        "{\"op\": [{\"i\": \"b\", \"p\": \"x\"}], \"meta\": {\"user_id\": \"u\", \"end_ts\": 6}}\n"
        "{\"op\": [{\"i\": \"z\", \"p\": 3}], \"meta\": {\"user_id\": \"u\"}}\n"
        "{\"nope\": 1}\n",
        "doc");
    REQUIRE(r.logs.size() == 1);
    CHECK(r.logs[0].doc_id == "doc");
    CHECK(r.logs[0].author_name(r.logs[0].ops[0].author) == "unknown");
    CHECK(r.logs[0].ops.size() == 1);
    CHECK(r.skipped_components == 3);
    CHECK(r.warnings.size() == 3);
    CHECK(r.warnings.back().line == 5);
  }

  TEST_CASE("malformed input") {
    CHECK_THROWS_AS(import_sharelatex("[{", "d"), DataError);
    CHECK_THROWS_AS(import_sharelatex("{}\n{oops", "d"), DataError);
  }
}
