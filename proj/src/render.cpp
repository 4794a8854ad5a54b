#include "cetrace/render.hpp"

#include <algorithm>
#include <array>

#include <fmt/format.h>

namespace cetrace {

Scene build_scene(const EditLog& log, Duration gap, const Window& window) {
  Scene scene;
  scene.doc_id = log.doc_id;
  if (log.ops.empty()) return scene;

  const auto origin = log.ops.front().ts;
  auto seconds = [&](Timestamp ts) { return to_seconds(ts - origin); };

  std::vector<std::size_t> color(log.authors.size(), SIZE_MAX);
  for (const auto& op : log.ops) {
    auto& c = color.at(op.author.value);
    if (c == SIZE_MAX) c = scene.authors++;
    scene.dots.push_back({seconds(op.ts), static_cast<double>(op.pos), c, op.action});
  }

  scene.x_min = 0;
  scene.x_max = seconds(log.ops.back().ts);
  const auto [lo, hi] = std::minmax_element(log.ops.begin(), log.ops.end(),
                                            [](const EditOp& a, const EditOp& b) { return a.pos < b.pos; });
  scene.y_min = static_cast<double>(lo->pos);
  scene.y_max = static_cast<double>(hi->pos);

  for (const auto& s : segment(log, gap)) {
    scene.sessions.push_back({s.index, seconds(s.start_ts), seconds(s.end_ts)});
    for (const auto& c : clusterize(s, window)) {
      scene.clusters.push_back({s.index, c.members.size(), seconds(c.min_ts), seconds(c.max_ts),
                                static_cast<double>(c.min_pos), static_cast<double>(c.max_pos)});
    }
  }
  return scene;
}

namespace {

constexpr std::array<const char*, 8> kPalette{"#1b9e77", "#d95f02", "#7570b3", "#e7298a",
                                              "#66a61e", "#e6ab02", "#a6761d", "#666666"};

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  double lo, span, px0, px_len;

  Axis(double min, double max, double start, double length) : px0(start), px_len(length) {
    lo = min;
    span = max > min ? max - min : 1.0;
  }
  double operator()(double v) const { return px0 + (v - lo) / span * px_len; }
};

}  // namespace

std::string render_svg(const Scene& scene, double width, double height) {
  if (!(width > 0) || !(height > 0)) throw UsageError("figure dimensions must be positive");
  const double mx = 0.05 * width, my = 0.05 * height;
  const Axis x(scene.x_min, scene.x_max, mx, width - 2 * mx);
  // SVG y grows downward; positions grow upward.
  const Axis y(scene.y_min, scene.y_max, height - my, -(height - 2 * my));
  const double pad_x = 0.004 * width, pad_y = 0.004 * height;

  std::string out;
  auto put = [&](std::string_view f, const auto&... args) {
    fmt::format_to(std::back_inserter(out), fmt::runtime(f), args...);
  };

  put("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
  put("<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{:.2f}\" height=\"{:.2f}\" "
      "viewBox=\"0 0 {:.2f} {:.2f}\">\n",
      width, height, width, height);
  put("<title>{}</title>\n", xml_escape(scene.doc_id));
  put("<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n");
  put("<line class=\"axis\" x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\"/>\n", mx, height - my,
      width - mx, height - my);
  put("<line class=\"axis\" x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\"/>\n", mx, height - my,
      mx, my);
  put("</g>\n");
  put("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"10\" text-anchor=\"end\">time (s)</text>\n", width - mx,
      height - 0.01 * height);
  put("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"10\">position</text>\n", mx, 0.8 * my);

  put("<g class=\"sessions\" stroke-width=\"1\">\n");
  for (const auto& s : scene.sessions) {
    put("<line class=\"session-start\" stroke=\"blue\" x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" "
        "y2=\"{:.2f}\"/>\n",
        x(s.start), my, x(s.start), height - my);
    put("<line class=\"session-end\" stroke=\"red\" x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" "
        "y2=\"{:.2f}\"/>\n",
        x(s.end), my, x(s.end), height - my);
  }
  put("</g>\n");

  put("<g class=\"clusters\" fill=\"#cfe3f7\" fill-opacity=\"0.5\" stroke=\"#4a90d9\">\n");
  for (const auto& c : scene.clusters) {
    const double left = x(c.x0) - pad_x, right = x(c.x1) + pad_x;
    const double top = y(c.y1) - pad_y, bottom = y(c.y0) + pad_y;
    put("<rect class=\"cluster\" x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\"/>\n", left,
        top, right - left, bottom - top);
  }
  put("</g>\n");

  put("<g class=\"dots\">\n");
  for (const auto& d : scene.dots) {
    put("<circle class=\"dot {}\" cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2\" fill=\"{}\"/>\n", to_string(d.action),
        x(d.x), y(d.y), kPalette[d.color % kPalette.size()]);
  }
  put("</g>\n</svg>\n");
  return out;
}

}  // namespace cetrace
