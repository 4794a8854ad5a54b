#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "cetrace/log_model.hpp"

namespace cetrace {

struct ImportResult {
  std::vector<EditLog> logs;
  std::size_t updates = 0;
  std::size_t skipped_components = 0;
  std::vector<LineIssue> warnings;
};

/// Best-effort conversion of ShareLaTeX document-update history into edit
/// logs. Accepts a JSON array of updates or one update per line, each shaped
/// {"doc_id", "op": [{"i"|"d": text, "p": pos}, ...], "meta": {"user_id",
/// "start_ts", "end_ts"}}. Every component of an update receives the update's
/// end_ts (start_ts if absent), so intra-update timing is lost; components
/// other than insert/delete are skipped. `fallback_doc` names updates without
/// a doc_id. Throws DataError on unparsable input.
ImportResult import_sharelatex(std::string_view text, const std::string& fallback_doc);

}  // namespace cetrace
