#include "cetrace/log_model.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

namespace cetrace {

using nlohmann::json;

std::string_view to_string(Action action) {
  return action == Action::Insertion ? "ins" : "del";
}

AuthorId EditLog::intern(std::string_view author) {
  for (std::size_t i = 0; i < authors.size(); ++i) {
    if (authors[i] == author) return AuthorId{static_cast<std::uint32_t>(i)};
  }
  authors.emplace_back(author);
  return AuthorId{static_cast<std::uint32_t>(authors.size() - 1)};
}

std::size_t utf8_length(std::string_view text) {
  return static_cast<std::size_t>(std::count_if(text.begin(), text.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0U) != 0x80U;
  }));
}

namespace {

struct Record {
  std::string doc;
  std::string author;
  EditOp op;
};

bool read_integer(const json& obj, const char* key, std::int64_t& out, std::string& reason) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    reason = std::string("missing field '") + key + "'";
    return false;
  }
  if (!it->is_number_integer()) {
    reason = std::string("field '") + key + "' must be an integer";
    return false;
  }
  out = it->get<std::int64_t>();
  return true;
}

bool read_string(const json& obj, const char* key, std::string& out, std::string& reason) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    reason = std::string("missing field '") + key + "'";
    return false;
  }
  if (!it->is_string()) {
    reason = std::string("field '") + key + "' must be a string";
    return false;
  }
  out = it->get<std::string>();
  return true;
}

std::optional<Record> decode_record(std::string_view line, std::string& reason) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    reason = std::string("malformed JSON: ") + e.what();
    return std::nullopt;
  }
  if (!obj.is_object()) {
    reason = "record is not a JSON object";
    return std::nullopt;
  }

  Record rec;
  std::int64_t ts = 0;
  std::string action;
  if (!read_string(obj, "doc", rec.doc, reason) || !read_integer(obj, "ts", ts, reason) ||
      !read_string(obj, "author", rec.author, reason) ||
      !read_string(obj, "action", action, reason) ||
      !read_integer(obj, "pos", rec.op.pos, reason) ||
      !read_integer(obj, "len", rec.op.len, reason)) {
    return std::nullopt;
  }
  rec.op.ts = from_millis(ts);

  if (action == "ins") {
    rec.op.action = Action::Insertion;
  } else if (action == "del") {
    rec.op.action = Action::Deletion;
  } else {
    reason = "field 'action' must be \"ins\" or \"del\"";
    return std::nullopt;
  }
  if (rec.op.pos < 0) {
    reason = "field 'pos' must be >= 0";
    return std::nullopt;
  }
  if (rec.op.len < 1) {
    reason = "field 'len' must be >= 1";
    return std::nullopt;
  }
  if (const auto it = obj.find("content"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) {
      reason = "field 'content' must be a string";
      return std::nullopt;
    }
    auto text = it->get<std::string>();
    if (static_cast<std::int64_t>(utf8_length(text)) != rec.op.len) {
      reason = "content length " + std::to_string(utf8_length(text)) + " does not match len " +
               std::to_string(rec.op.len);
      return std::nullopt;
    }
    rec.op.content = std::move(text);
  }
  return rec;
}

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

}  // namespace

ParseResult parse_canonical(std::istream& in) {
  ParseResult result;
  struct DocState {
    std::size_t slot;
    std::unordered_map<std::string, AuthorId> authors;
    Timestamp last_ts;
  };
  std::unordered_map<std::string, DocState> docs;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    ++result.report.record_count;

    std::string reason;
    auto rec = decode_record(line, reason);
    if (!rec) {
      result.report.errors.push_back({line_no, std::move(reason)});
      continue;
    }

    auto [it, fresh] = docs.try_emplace(rec->doc);
    DocState& state = it->second;
    if (fresh) {
      state.slot = result.logs.size();
      result.logs.push_back(EditLog{rec->doc, {}, {}});
    } else if (rec->op.ts < state.last_ts) {
      result.report.warnings.push_back(
          {line_no, "timestamp " + std::to_string(to_millis(rec->op.ts)) + " precedes " +
                        std::to_string(to_millis(state.last_ts)) + " in doc '" + rec->doc +
                        "'; log will be re-sorted"});
    }
    state.last_ts = fresh ? rec->op.ts : std::max(state.last_ts, rec->op.ts);

    EditLog& log = result.logs[state.slot];
    auto [ait, new_author] = state.authors.try_emplace(rec->author, AuthorId{});
    if (new_author) {
      log.authors.push_back(rec->author);
      ait->second = AuthorId{static_cast<std::uint32_t>(log.authors.size() - 1)};
    }
    rec->op.author = ait->second;
    rec->op.seq = log.ops.size();
    log.ops.push_back(std::move(rec->op));
  }

  for (const auto& log : result.logs) {
    result.report.docs.push_back(
        {log.doc_id, log.authors.size(), log.ops.size(), amount_of_edit(log)});
  }
  return result;
}

ParseResult parse_canonical(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_canonical(in);
}

EditLog normalize(EditLog log) {
  std::stable_sort(log.ops.begin(), log.ops.end(), [](const EditOp& a, const EditOp& b) {
    if (a.ts != b.ts) return a.ts < b.ts;
    return a.seq < b.seq;
  });

  std::vector<std::string> authors;
  std::vector<std::int64_t> remap(log.authors.size(), -1);
  for (std::size_t i = 0; i < log.ops.size(); ++i) {
    auto& op = log.ops[i];
    op.seq = i;
    auto& slot = remap.at(op.author.value);
    if (slot < 0) {
      slot = static_cast<std::int64_t>(authors.size());
      authors.push_back(std::move(log.authors[op.author.value]));
    }
    op.author = AuthorId{static_cast<std::uint32_t>(slot)};
  }
  log.authors = std::move(authors);
  return log;
}

bool is_normalized(const EditLog& log) {
  std::uint32_t next_author = 0;
  for (std::size_t i = 0; i < log.ops.size(); ++i) {
    const auto& op = log.ops[i];
    if (op.seq != i) return false;
    if (i > 0 && op.ts < log.ops[i - 1].ts) return false;
    if (op.author.value > next_author) return false;
    if (op.author.value == next_author) ++next_author;
  }
  return next_author == log.authors.size();
}

void emit_canonical(const EditLog& log, std::ostream& out) {
  for (const auto& op : log.ops) {
    nlohmann::ordered_json rec;
    rec["doc"] = log.doc_id;
    rec["ts"] = to_millis(op.ts);
    rec["author"] = log.author_name(op.author);
    rec["action"] = to_string(op.action);
    rec["pos"] = op.pos;
    rec["len"] = op.len;
    if (op.content) rec["content"] = *op.content;
    out << rec.dump() << '\n';
  }
}

std::string emit_canonical(const EditLog& log) {
  std::ostringstream out;
  emit_canonical(log, out);
  return out.str();
}

std::int64_t amount_of_edit(const EditLog& log) {
  return std::accumulate(log.ops.begin(), log.ops.end(), std::int64_t{0},
                         [](std::int64_t acc, const EditOp& op) { return acc + op.len; });
}

namespace {

SummaryRow summarize(const std::vector<double>& values) {
  SummaryRow row;
  row.min = *std::min_element(values.begin(), values.end());
  row.max = *std::max_element(values.begin(), values.end());
  row.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double ss = 0;
  for (double v : values) ss += (v - row.mean) * (v - row.mean);
  row.stddev = std::sqrt(ss / static_cast<double>(values.size()));
  return row;
}

}  // namespace

CorpusSummary corpus_summary(std::span<const EditLog> logs) {
  if (logs.empty()) throw DataError("empty corpus");
  std::vector<double> authors, edits, amounts;
  for (const auto& log : logs) {
    authors.push_back(static_cast<double>(log.authors.size()));
    edits.push_back(static_cast<double>(log.ops.size()));
    amounts.push_back(static_cast<double>(amount_of_edit(log)));
  }
  return {logs.size(), summarize(authors), summarize(edits), summarize(amounts)};
}

}  // namespace cetrace
