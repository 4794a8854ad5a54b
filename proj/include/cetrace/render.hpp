#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cetrace/clustering.hpp"
#include "cetrace/log_model.hpp"

namespace cetrace {

/// Time-position view of one document. x is seconds since the first edit,
/// y is the edit position in characters.
struct Scene {
  struct Boundary {
    std::size_t session = 0;
    double start = 0;
    double end = 0;
  };
  struct Rect {
    std::size_t session = 0;
    std::size_t size = 0;
    double x0 = 0, x1 = 0;
    double y0 = 0, y1 = 0;
  };
  struct Dot {
    double x = 0;
    double y = 0;
    std::size_t color = 0;  // author index by first appearance
    Action action = Action::Insertion;
  };

  std::string doc_id;
  double x_min = 0, x_max = 0;
  double y_min = 0, y_max = 0;
  std::vector<Boundary> sessions;
  std::vector<Rect> clusters;
  std::vector<Dot> dots;
  std::size_t authors = 0;
};

inline constexpr Window kFigureWindow{Duration{300'000}, 400};

/// Empty log gives an empty scene.
Scene build_scene(const EditLog& log, Duration gap, const Window& window = kFigureWindow);

/// SVG 1.1 document. Data ranges map affinely onto the canvas minus 5%
/// margins; a zero-width range is widened to one unit. Throws UsageError
/// unless both dimensions are positive.
std::string render_svg(const Scene& scene, double width = 960, double height = 540);

}  // namespace cetrace
