#include "svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <regex>
#include <sstream>

#include "celldiv/errors.hpp"
#include "celldiv/io.hpp"

namespace celldiv::cli {
namespace {

constexpr double kCanvas = 800.0;
constexpr double kMargin = 20.0;

// A few stops of a perceptually ordered dark-to-light ramp.
constexpr std::array<std::array<double, 3>, 5> kRamp = {{{68, 1, 84},
                                                         {59, 82, 139},
                                                         {33, 145, 140},
                                                         {94, 201, 98},
                                                         {253, 231, 37}}};

std::string color_at(double u) {
  u = std::clamp(u, 0.0, 1.0) * (kRamp.size() - 1);
  const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(u), kRamp.size() - 2);
  const double f = u - static_cast<double>(i);
  char buf[8];
  int rgb[3];
  for (int c = 0; c < 3; ++c) rgb[c] = static_cast<int>(std::lround(kRamp[i][c] + f * (kRamp[i + 1][c] - kRamp[i][c])));
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

std::string points_attr(const std::vector<Point>& pts) {
  std::string out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) out += ' ';
    out += format_double(pts[i].x) + "," + format_double(pts[i].y);
  }
  return out;
}

[[noreturn]] void fail(const std::string& message) { throw ConfigError("svg: " + message); }

double number(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) fail(std::string("bad number in ") + what);
    return v;
  } catch (const std::logic_error&) {
    fail(std::string("bad number in ") + what);
  }
}

}  // namespace

std::string render_svg(const SvgScene& scene) {
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  if (!scene.window.empty()) {
    x0 = x1 = scene.window[0].x;
    y0 = y1 = scene.window[0].y;
    for (const Point& p : scene.window) {
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
    }
  }
  const double scale = (kCanvas - 2.0 * kMargin) / std::max(x1 - x0, y1 - y0);
  const double width = (x1 - x0) * scale + 2.0 * kMargin;
  const double height = (y1 - y0) * scale + 2.0 * kMargin;

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_double(width)
      << "\" height=\"" << format_double(height) << "\" viewBox=\"0 0 " << format_double(width)
      << " " << format_double(height) << "\" data-time=\"" << format_double(scene.time) << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<g transform=\"matrix(" << format_double(scale) << " 0 0 " << format_double(-scale) << " "
      << format_double(kMargin - x0 * scale) << " " << format_double(kMargin + y1 * scale)
      << ")\" stroke-linecap=\"round\" fill=\"none\">\n"
      << "<polygon class=\"window\" points=\"" << points_attr(scene.window)
      << "\" stroke=\"black\" stroke-width=\"2\" vector-effect=\"non-scaling-stroke\"/>\n";
  for (const TimedSegment& s : scene.segments) {
    const double u = scene.time > 0.0 ? s.birth_time / scene.time : 0.0;
    out << "<line x1=\"" << format_double(s.segment.p.x) << "\" y1=\"" << format_double(s.segment.p.y)
        << "\" x2=\"" << format_double(s.segment.q.x) << "\" y2=\"" << format_double(s.segment.q.y)
        << "\" data-birth-time=\"" << format_double(s.birth_time) << "\" stroke=\"" << color_at(u)
        << "\" stroke-width=\"1.5\" vector-effect=\"non-scaling-stroke\"/>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

SvgScene parse_svg(std::string_view text) {
  const std::string s(text);
  SvgScene scene;
  static const std::regex svg_re(R"re(<svg [^>]*data-time="([^"]*)")re");
  static const std::regex window_re(R"re(<polygon class="window" points="([^"]*)")re");
  static const std::regex line_re(
      R"re(<line x1="([^"]*)" y1="([^"]*)" x2="([^"]*)" y2="([^"]*)" data-birth-time="([^"]*)")re");
  std::smatch m;
  if (!std::regex_search(s, m, svg_re)) fail("missing <svg data-time>");
  scene.time = number(m[1], "data-time");
  if (!std::regex_search(s, m, window_re)) fail("missing window polygon");
  std::istringstream pts(m[1].str());
  std::string pair;
  while (pts >> pair) {
    const auto comma = pair.find(',');
    if (comma == std::string::npos) fail("bad window point");
    scene.window.push_back({number(pair.substr(0, comma), "window"), number(pair.substr(comma + 1), "window")});
  }
  for (auto it = std::sregex_iterator(s.begin(), s.end(), line_re); it != std::sregex_iterator(); ++it) {
    const auto& g = *it;
    scene.segments.push_back({Segment{{number(g[1], "x1"), number(g[2], "y1")},
                                      {number(g[3], "x2"), number(g[4], "y2")}},
                              number(g[5], "data-birth-time")});
  }
  return scene;
}

}  // namespace celldiv::cli
