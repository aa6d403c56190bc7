#pragma once

// SVG rendering of a tessellation. Segment coordinates are written in world
// units with 17 significant digits inside a y-flipping group transform, so
// the file parses back to the exact geometry.

#include <string>
#include <string_view>
#include <vector>

#include "celldiv/engine.hpp"
#include "celldiv/geometry.hpp"

namespace celldiv::cli {

struct SvgScene {
  std::vector<Point> window;
  double time = 0.0;
  std::vector<TimedSegment> segments;
};

/// Segments are colored from dark (early) to light (late) by birth_time / time.
std::string render_svg(const SvgScene& scene);

/// Reads back a file produced by render_svg. Throws ConfigError on anything else.
SvgScene parse_svg(std::string_view text);

}  // namespace celldiv::cli
