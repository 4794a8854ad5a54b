#include "cetrace/sharelatex.hpp"

#include <map>
#include <sstream>

#include "json.hpp"

namespace cetrace {

namespace {

using json = nlohmann::json;

std::string id_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_object() && v.contains("$oid")) return v.at("$oid").get<std::string>();
  return v.dump();
}

}  // namespace

ImportResult import_sharelatex(std::string_view text, const std::string& fallback_doc) {
  std::vector<std::pair<std::size_t, json>> updates;
  const auto first = text.find_first_not_of(" \t\r\n");
  try {
    if (first != std::string_view::npos && text[first] == '[') {
      std::size_t k = 0;
      for (auto& u : json::parse(text)) updates.emplace_back(++k, std::move(u));
    } else {
      std::istringstream in{std::string(text)};
      std::string line;
      for (std::size_t n = 1; std::getline(in, line); ++n) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        updates.emplace_back(n, json::parse(line));
      }
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("unparsable ShareLaTeX export: ") + e.what());
  }

  ImportResult result;
  std::map<std::string, std::size_t> slot;
  for (const auto& [line, u] : updates) {
    if (!u.is_object() || !u.contains("op") || !u.at("op").is_array()) {
      result.warnings.push_back({line, "update without an op list"});
      continue;
    }
    ++result.updates;
    const json meta = u.value("meta", json::object());
    const auto doc = u.contains("doc_id") ? id_string(u.at("doc_id")) : fallback_doc;
    std::string user = "unknown";
    if (meta.contains("user_id") && !meta.at("user_id").is_null()) {
      user = id_string(meta.at("user_id"));
    } else {
      result.warnings.push_back({line, "update without user_id"});
    }
    const json* ts = meta.contains("end_ts") ? &meta.at("end_ts")
                     : meta.contains("start_ts") ? &meta.at("start_ts")
                                                 : nullptr;
    if (ts == nullptr || !ts->is_number_integer()) {
      result.warnings.push_back({line, "update without a timestamp"});
      result.skipped_components += u.at("op").size();
      continue;
    }

    auto [it, fresh] = slot.try_emplace(doc, result.logs.size());
    if (fresh) result.logs.push_back(EditLog{doc, {}, {}});
    auto& log = result.logs[it->second];
    const auto author = log.intern(user);

    for (const auto& c : u.at("op")) {
      if (!c.is_object()) {
        ++result.skipped_components;
        continue;
      }
      const bool ins = c.contains("i"), del = c.contains("d");
      if (ins == del || !c.contains("p") || !c.at("p").is_number_integer() ||
          !c.at(ins ? "i" : "d").is_string()) {
        ++result.skipped_components;
        continue;
      }
      EditOp op;
      op.ts = from_millis(ts->get<std::int64_t>());
      op.author = author;
      op.action = ins ? Action::Insertion : Action::Deletion;
      op.pos = c.at("p").get<std::int64_t>();
      op.content = c.at(ins ? "i" : "d").get<std::string>();
      op.len = static_cast<std::int64_t>(utf8_length(*op.content));
      op.seq = log.ops.size();
      log.ops.push_back(std::move(op));
    }
  }
  for (auto& log : result.logs) log = normalize(std::move(log));
  return result;
}

}  // namespace cetrace
