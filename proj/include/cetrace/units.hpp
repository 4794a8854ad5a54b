#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cetrace/clustering.hpp"
#include "cetrace/types.hpp"

namespace cetrace {

/// "30s", "7mn", "1500ms", "2h"; a bare number is seconds. Throws UsageError.
Duration parse_duration(std::string_view text);

/// "30s,10c" or "30,10". Throws UsageError.
Window parse_window(std::string_view text);

/// Comma- or whitespace-separated durations.
std::vector<Duration> parse_duration_list(std::string_view text);

/// Windows separated by ';'.
std::vector<Window> parse_window_list(std::string_view text);

std::vector<Window> default_windows();

}  // namespace cetrace
