#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "cetrace/log_model.hpp"
#include "cetrace/segmentation.hpp"

namespace testing {

struct Row {
  std::int64_t ts_ms;
  std::string author;
  std::int64_t pos = 0;
  std::int64_t len = 1;
};

// Builds a normalized log; rows need not be sorted.
inline cetrace::EditLog make_log(const std::string& doc, std::initializer_list<Row> rows) {
  cetrace::EditLog log{doc, {}, {}};
  for (const auto& r : rows) {
    cetrace::EditOp op;
    op.ts = cetrace::from_millis(r.ts_ms);
    op.author = log.intern(r.author);
    op.pos = r.pos;
    op.len = r.len;
    op.seq = log.ops.size();
    log.ops.push_back(op);
  }
  return cetrace::normalize(std::move(log));
}

// Single session spanning the whole log.
inline cetrace::Session whole(const cetrace::EditLog& log) {
  auto sessions = cetrace::segment(log, std::chrono::hours{1000});
  return sessions.front();
}

}  // namespace testing
