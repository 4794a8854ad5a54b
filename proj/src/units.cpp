#include "cetrace/units.hpp"

#include <cctype>
#include <charconv>

namespace cetrace {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::int64_t parse_count(std::string_view digits, std::string_view whole) {
  std::int64_t v = 0;
  const auto* end = digits.data() + digits.size();
  const auto [ptr, ec] = std::from_chars(digits.data(), end, v);
  if (digits.empty() || ec != std::errc() || ptr != end) {
    throw UsageError("invalid number in '" + std::string(whole) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, std::string_view seps) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto stop = s.find_first_of(seps, start);
    const auto piece = trim(s.substr(start, stop == std::string_view::npos ? stop : stop - start));
    if (!piece.empty()) out.push_back(piece);
    if (stop == std::string_view::npos) break;
    start = stop + 1;
  }
  return out;
}

}  // namespace

Duration parse_duration(std::string_view text) {
  const auto s = trim(text);
  std::size_t k = 0;
  while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
  const auto value = parse_count(s.substr(0, k), text);
  const auto unit = s.substr(k);
  std::int64_t scale = 0;
  if (unit.empty() || unit == "s") {
    scale = 1000;
  } else if (unit == "ms") {
    scale = 1;
  } else if (unit == "mn" || unit == "m" || unit == "min") {
    scale = 60'000;
  } else if (unit == "h") {
    scale = 3'600'000;
  } else {
    throw UsageError("unknown duration unit in '" + std::string(text) + "'");
  }
  const Duration d{value * scale};
  if (d <= Duration::zero()) throw UsageError("duration must be positive: '" + std::string(text) + "'");
  return d;
}

Window parse_window(std::string_view text) {
  const auto comma = text.find(',');
  if (comma == std::string_view::npos) {
    throw UsageError("window must look like 30s,10c: '" + std::string(text) + "'");
  }
  auto p = trim(text.substr(comma + 1));
  if (!p.empty() && p.back() == 'c') p.remove_suffix(1);
  Window w{parse_duration(text.substr(0, comma)), parse_count(p, text)};
  validate(w);
  return w;
}

std::vector<Duration> parse_duration_list(std::string_view text) {
  std::vector<Duration> out;
  for (auto piece : split(text, ", \t")) out.push_back(parse_duration(piece));
  if (out.empty()) throw UsageError("empty duration list");
  return out;
}

std::vector<Window> parse_window_list(std::string_view text) {
  std::vector<Window> out;
  for (auto piece : split(text, ";")) out.push_back(parse_window(piece));
  if (out.empty()) throw UsageError("empty window list");
  return out;
}

std::vector<Window> default_windows() {
  return {{Duration{30'000}, 10}, {Duration{10'000}, 5}, {Duration{60'000}, 20}};
}

}  // namespace cetrace
