#include "celldiv/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "celldiv/errors.hpp"

namespace celldiv {

namespace {

double max_pair_distance(std::span<const Point> pts) noexcept {
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const Point d = pts[j] - pts[i];
      best = std::max(best, dot(d, d));
    }
  }
  return std::sqrt(best);
}

// Fan from the first vertex in extended precision, so the rounding error
// scales with the polygon's size rather than its distance from the origin
// and stays well below the split additivity tolerance.
double signed_ring_area(std::span<const Point> ring) noexcept {
  using Wide = long double;
  Wide twice = 0.0;
  const std::size_t n = ring.size();
  if (n < 3) return 0.0;
  const Wide ox = ring[0].x;
  const Wide oy = ring[0].y;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    twice += (ring[i].x - ox) * (ring[i + 1].y - oy) - (ring[i].y - oy) * (ring[i + 1].x - ox);
  }
  return static_cast<double>(0.5L * twice);
}

// A double near x lying as close as possible to the line through a and b,
// moving x by at most `reach`. Rounding x otherwise leaves it off the edge by
// up to half an ulp of its coordinates, which breaks area additivity on
// slivers. The offset from the line is linear in the ulp steps (i, j) taken
// along the axis where a step moves it least (fine) and the other (coarse).
Point snap_to_edge(Point x, Point a, Point b, double reach) noexcept {
  using Wide = long double;
  constexpr double kDirectRatio = 64.0;
  constexpr double kMaxSteps = 2048.0;
  const Wide e[2] = {Wide(b.x) - a.x, Wide(b.y) - a.y};
  auto offset = [&](Point c) { return std::abs(e[0] * (Wide(c.y) - a.y) - e[1] * (Wide(c.x) - a.x)); };
  // Steps of the ulp at the far end of the reachable range from a base
  // rounded to that grid, so every candidate is exactly representable even
  // across a binade boundary.
  double p[2] = {x.x, x.y};
  double u[2];
  for (int k = 0; k < 2; ++k) {
    const double top = std::abs(p[k]) + reach;
    u[k] = std::nextafter(top, std::numeric_limits<double>::infinity()) - top;
    p[k] = std::nearbyint(p[k] / u[k]) * u[k];
  }
  // offset(c) = f0 + i rate[fine] + j rate[coarse] for c = x + steps
  const Wide f0 = e[0] * (Wide(p[1]) - a.y) - e[1] * (Wide(p[0]) - a.x);
  const Wide rate[2] = {-e[1] * u[0], e[0] * u[1]};
  const int fine = std::abs(rate[0]) <= std::abs(rate[1]) ? 0 : 1;
  const int coarse = 1 - fine;
  if (rate[coarse] == 0) return x;
  const double fine_limit = std::floor(reach / u[fine]);
  const double coarse_limit = std::floor(reach / u[coarse]);

  double best_i = 0.0;
  double best_j = 0.0;
  auto consider = [&, best_off = std::abs(f0)](double i, double j) mutable {
    const Wide off = std::abs(f0 + Wide(i) * rate[fine] + Wide(j) * rate[coarse]);
    if (off < best_off) {
      best_off = off;
      best_i = i;
      best_j = j;
    }
  };
  if (rate[fine] == 0) {
    // axis-parallel edge: only the coarse coordinate matters
    consider(0.0, std::clamp(static_cast<double>(std::round(-f0 / rate[coarse])), -coarse_limit, coarse_limit));
  } else if (std::abs(rate[coarse] / rate[fine]) > kDirectRatio) {
    // fine steps resolve the offset well; round them for a few coarse steps
    const double j0 = static_cast<double>(std::round(-f0 / rate[coarse]));
    for (double j = j0 - 2.0; j <= j0 + 2.0; j += 1.0) {
      if (std::abs(j) > coarse_limit) continue;
      const Wide i = std::round(-(f0 + Wide(j) * rate[coarse]) / rate[fine]);
      consider(std::clamp(static_cast<double>(i), -fine_limit, fine_limit), j);
    }
  } else {
    // comparable steps: walk the fine axis outward from the base, rounding
    // the coarse one, until the residual is a small fraction of a coarse
    // step; only that fraction matters, so double precision suffices
    constexpr double kGoodEnough = 1.0 / 256.0;
    const double steps = std::min(kMaxSteps, fine_limit);
    const double t0 = static_cast<double>(-f0 / rate[coarse]);
    const double slope = static_cast<double>(-rate[fine] / rate[coarse]);
    double best_gap = std::abs(t0);
    double walk_i = 0.0;
    double walk_j = 0.0;
    for (double k = 1.0; k <= steps && best_gap > kGoodEnough; k += 1.0) {
      for (const double i : {k, -k}) {
        const double t = t0 + i * slope;
        const double j = std::clamp(std::nearbyint(t), -coarse_limit, coarse_limit);
        if (std::abs(t - j) < best_gap) {
          best_gap = std::abs(t - j);
          walk_i = i;
          walk_j = j;
        }
      }
      // rational slope: the residues repeat from here on
      if (std::abs(k * slope - std::nearbyint(k * slope)) < 1e-9) break;
    }
    consider(walk_i, walk_j);
  }
  double c[2];
  c[fine] = p[fine] + best_i * u[fine];
  c[coarse] = p[coarse] + best_j * u[coarse];
  const Point candidate{c[0], c[1]};
  // steps are exact within a binade; check in case one was crossed
  return offset(candidate) < offset(x) ? candidate : x;
}

double wrap_half_turn(double angle) noexcept {
  angle = std::fmod(angle, std::numbers::pi);
  if (angle < 0.0) angle += std::numbers::pi;
  if (angle >= std::numbers::pi) angle = 0.0;
  return angle;
}

}  // namespace

double norm(Point a) noexcept { return std::hypot(a.x, a.y); }
double distance(Point a, Point b) noexcept { return norm(a - b); }
Point unit_normal(double theta) noexcept { return {std::cos(theta), std::sin(theta)}; }

double ring_area(std::span<const Point> ring) noexcept {
  return std::abs(signed_ring_area(ring));
}

// ---------------------------------------------------------------------------
// Polygon

Polygon::Polygon(std::vector<Point> pts) {
  if (pts.size() < 3) {
    throw InvalidPolygon("polygon needs at least 3 vertices, got " + std::to_string(pts.size()));
  }
  for (const Point& p : pts) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw InvalidPolygon("polygon vertex is not finite");
    }
  }
  const double diam = max_pair_distance(pts);
  if (!(diam > 0.0)) throw InvalidPolygon("polygon has zero extent");
  const double tol = kSnapTolerance * diam;

  std::vector<Point> ring;
  ring.reserve(pts.size());
  for (const Point& p : pts) {
    if (ring.empty() || distance(ring.back(), p) > tol) ring.push_back(p);
  }
  while (ring.size() > 1 && distance(ring.front(), ring.back()) <= tol) ring.pop_back();
  if (ring.size() < 3) throw InvalidPolygon("polygon has fewer than 3 distinct vertices");

  if (signed_ring_area(ring) < 0.0) std::reverse(ring.begin(), ring.end());

  bool removed = true;
  while (removed && ring.size() >= 3) {
    removed = false;
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point& prev = ring[(i + n - 1) % n];
      const Point& cur = ring[i];
      const Point& next = ring[(i + 1) % n];
      const double base = distance(prev, next);
      const double off = base > 0.0 ? std::abs(cross(next - prev, cur - prev)) / base : 0.0;
      // Only forward-pointing collinear vertices are dropped; a backtracking
      // spike is a shape error, not noise.
      if (off <= tol && dot(cur - prev, next - cur) >= 0.0) {
        ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(i));
        removed = true;
        break;
      }
    }
  }
  if (ring.size() < 3) throw InvalidPolygon("polygon is degenerate (collinear vertices)");

  const std::size_t n = ring.size();
  double turning = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point e0 = ring[i] - ring[(i + n - 1) % n];
    const Point e1 = ring[(i + 1) % n] - ring[i];
    const double c = cross(e0, e1);
    if (!(c > 0.0)) throw InvalidPolygon("polygon is not strictly convex");
    turning += std::atan2(c, dot(e0, e1));
  }
  if (std::abs(turning - 2.0 * std::numbers::pi) > 1e-6) {
    throw InvalidPolygon("polygon boundary is self-intersecting");
  }

  area_ = signed_ring_area(ring);
  if (!(area_ > 0.0)) throw InvalidPolygon("polygon has non-positive area");

  std::rotate(ring.begin(), std::min_element(ring.begin(), ring.end()), ring.end());
  vertices_ = std::move(ring);
  diameter_ = max_pair_distance(vertices_);
}

Polygon Polygon::rectangle(double x0, double y0, double x1, double y1) {
  return Polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

Polygon Polygon::square(double side, Point lower_left) {
  return rectangle(lower_left.x, lower_left.y, lower_left.x + side, lower_left.y + side);
}

Polygon Polygon::centered_square(double side, Point center) {
  const double h = 0.5 * side;
  return rectangle(center.x - h, center.y - h, center.x + h, center.y + h);
}

Polygon Polygon::regular(Point center, double radius, int sides, double phase) {
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(std::max(sides, 0)));
  for (int k = 0; k < sides; ++k) {
    const double a = phase + 2.0 * std::numbers::pi * k / sides;
    pts.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
  }
  return Polygon(std::move(pts));
}

double Polygon::perimeter() const noexcept {
  double sum = 0.0;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) sum += distance(vertices_[i], vertices_[(i + 1) % n]);
  return sum;
}

Point Polygon::centroid() const noexcept {
  const Point o = vertices_[0];
  double cx = 0.0;
  double cy = 0.0;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = vertices_[i] - o;
    const Point b = vertices_[(i + 1) % n] - o;
    const double w = cross(a, b);
    cx += (a.x + b.x) * w;
    cy += (a.y + b.y) * w;
  }
  return {o.x + cx / (6.0 * area_), o.y + cy / (6.0 * area_)};
}

bool Polygon::contains(Point p, double tol) const noexcept {
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = vertices_[i];
    const Point e = vertices_[(i + 1) % n] - a;
    if (cross(e, p - a) < -tol * norm(e)) return false;
  }
  return true;
}

bool Polygon::contains(const Polygon& other) const noexcept {
  const double tol = kSnapTolerance * diameter_;
  return std::all_of(other.vertices_.begin(), other.vertices_.end(),
                     [&](const Point& p) { return contains(p, tol); });
}

Polygon Polygon::translated(Point offset) const {
  std::vector<Point> pts(vertices_.begin(), vertices_.end());
  for (Point& p : pts) p = p + offset;
  return Polygon(std::move(pts));
}

Polygon Polygon::scaled(double factor, Point about) const {
  std::vector<Point> pts(vertices_.begin(), vertices_.end());
  for (Point& p : pts) p = about + factor * (p - about);
  return Polygon(std::move(pts));
}

// ---------------------------------------------------------------------------
// Hyperplane

Hyperplane::Hyperplane(double theta, double offset) : theta_(theta), offset_(offset) {
  if (!(theta >= 0.0 && theta < std::numbers::pi)) {
    throw std::invalid_argument("hyperplane angle must lie in [0, pi)");
  }
  if (!std::isfinite(offset)) throw std::invalid_argument("hyperplane offset must be finite");
}

Hyperplane Hyperplane::through(Point p, double theta) {
  return Hyperplane(theta, dot(p, unit_normal(theta)));
}

// ---------------------------------------------------------------------------
// Splitting and support

SplitResult split(const Polygon& cell, const Hyperplane& h) {
  const auto verts = cell.vertices();
  const std::size_t n = verts.size();
  const double eps = kSnapTolerance * cell.diameter();

  std::vector<double> d(n);
  double dmin = std::numeric_limits<double>::infinity();
  double dmax = -dmin;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = h.signed_distance(verts[i]);
    dmin = std::min(dmin, d[i]);
    dmax = std::max(dmax, d[i]);
  }
  if (dmax <= eps) return {std::nullopt, cell, std::nullopt};
  if (dmin >= -eps) return {cell, std::nullopt, std::nullopt};

  auto side = [eps](double v) { return v > eps ? 1 : (v < -eps ? -1 : 0); };
  std::vector<Point> plus;
  std::vector<Point> minus;
  std::vector<Point> on_line;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const int si = side(d[i]);
    const int sj = side(d[j]);
    if (si >= 0) plus.push_back(verts[i]);
    if (si <= 0) minus.push_back(verts[i]);
    if (si == 0) on_line.push_back(verts[i]);
    if (si * sj < 0) {
      const double t = d[i] / (d[i] - d[j]);
      const Point x = snap_to_edge(verts[i] + t * (verts[j] - verts[i]), verts[i], verts[j], eps);
      plus.push_back(x);
      minus.push_back(x);
      on_line.push_back(x);
    }
  }
  if (on_line.size() != 2) throw DegenerateSplit("split line meets the cell boundary ambiguously");

  auto make_piece = [&](std::vector<Point> pts) -> Polygon {
    try {
      Polygon piece(std::move(pts));
      if (piece.area() < kSliverFraction * cell.area()) throw DegenerateSplit("sliver piece");
      return piece;
    } catch (const InvalidPolygon& e) {
      throw DegenerateSplit(std::string("degenerate piece: ") + e.what());
    }
  };

  Segment trace{on_line[0], on_line[1]};
  if (trace.q < trace.p) std::swap(trace.p, trace.q);
  return {make_piece(std::move(plus)), make_piece(std::move(minus)), trace};
}

double support(const Polygon& cell, double theta, int sign) noexcept {
  const Point u = (sign >= 0 ? 1.0 : -1.0) * unit_normal(theta);
  double best = -std::numeric_limits<double>::infinity();
  for (const Point& v : cell.vertices()) best = std::max(best, dot(v, u));
  return best;
}

OffsetRange offset_range(const Polygon& cell, double theta) noexcept {
  const Point u = unit_normal(theta);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Point& v : cell.vertices()) {
    const double s = dot(v, u);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return {lo, hi};
}

double width(const Polygon& cell, double theta) noexcept {
  return support(cell, theta, +1) + support(cell, theta, -1);
}

bool hits(const Polygon& cell, const Hyperplane& h) noexcept {
  const double eps = kSnapTolerance * cell.diameter();
  const OffsetRange r = offset_range(cell, h.theta());
  return h.offset() > r.lo + eps && h.offset() < r.hi - eps;
}

IntrinsicVolumes intrinsic_volumes(const Polygon& cell) noexcept {
  return {1.0, 0.5 * cell.perimeter(), cell.area()};
}

std::size_t vertex_count(const Polygon& cell) noexcept { return cell.size(); }

Point sample_uniform_point(const Polygon& cell, Rng& rng) {
  const auto v = cell.vertices();
  const std::size_t triangles = v.size() - 2;
  const double target = rng.uniform() * cell.area();
  std::size_t k = 0;
  double acc = 0.0;
  for (; k + 1 < triangles; ++k) {
    acc += 0.5 * cross(v[k + 1] - v[0], v[k + 2] - v[0]);
    if (target < acc) break;
  }
  const double r1 = std::sqrt(rng.uniform());
  const double r2 = rng.uniform();
  const Point& a = v[0];
  const Point& b = v[k + 1];
  const Point& c = v[k + 2];
  return (1.0 - r1) * a + (r1 * (1.0 - r2)) * b + (r1 * r2) * c;
}

Polygon convex_hull(std::span<const Point> points) {
  std::vector<Point> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) throw InvalidPolygon("convex hull needs 3 distinct points");

  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Point& p : pts) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    const Point& p = pts[i];
    while (k >= lower && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) --k;
    hull[k++] = p;
  }
  hull.resize(k - 1);
  return Polygon(std::move(hull));
}

std::vector<Point> clip_to_slab(const Polygon& cell, double theta, double lo, double hi) {
  const Point u = unit_normal(theta);
  auto clip = [](const std::vector<Point>& ring, auto&& value) {
    std::vector<Point> out;
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point& a = ring[i];
      const Point& b = ring[(i + 1) % n];
      const double fa = value(a);
      const double fb = value(b);
      if (fa >= 0.0) out.push_back(a);
      if ((fa >= 0.0) != (fb >= 0.0)) out.push_back(a + (fa / (fa - fb)) * (b - a));
    }
    return out;
  };
  std::vector<Point> ring(cell.vertices().begin(), cell.vertices().end());
  ring = clip(ring, [&](Point p) { return dot(p, u) - lo; });
  if (ring.size() < 3) return {};
  ring = clip(ring, [&](Point p) { return hi - dot(p, u); });
  if (ring.size() < 3) return {};
  return ring;
}

std::optional<Segment> clip_segment(const Segment& s, const Polygon& cell) {
  const double tol = kSnapTolerance * std::max(cell.diameter(), s.length());
  const Point dir = s.q - s.p;
  const double len = norm(dir);
  double t0 = 0.0;
  double t1 = 1.0;
  const auto v = cell.vertices();
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = v[i];
    const Point e = v[(i + 1) % n] - a;
    const double elen = norm(e);
    const double f0 = cross(e, s.p - a);  // inside when >= 0
    const double df = cross(e, dir);
    if (std::abs(df) <= 1e-15 * elen * len) {
      if (f0 < -tol * elen) return std::nullopt;
      continue;
    }
    const double t = -f0 / df;
    if (df > 0.0) {
      t0 = std::max(t0, t);
    } else {
      t1 = std::min(t1, t);
    }
  }
  if (cell.contains(s.p, tol)) t0 = 0.0;
  if (cell.contains(s.q, tol)) t1 = 1.0;
  if (t0 >= t1) return std::nullopt;
  const Point p = t0 == 0.0 ? s.p : s.p + t0 * dir;
  const Point q = t1 == 1.0 ? s.q : s.p + t1 * dir;
  if (distance(p, q) <= tol) return std::nullopt;
  return Segment{p, q};
}

bool intersects(const Segment& a, const Segment& b) noexcept {
  const double scale = std::max({a.length(), b.length(), 1e-300});
  const double tol = kSnapTolerance * scale * scale;
  const double d1 = cross(a.q - a.p, b.p - a.p);
  const double d2 = cross(a.q - a.p, b.q - a.p);
  const double d3 = cross(b.q - b.p, a.p - b.p);
  const double d4 = cross(b.q - b.p, a.q - b.p);
  auto sgn = [tol](double v) { return v > tol ? 1 : (v < -tol ? -1 : 0); };
  const int s1 = sgn(d1), s2 = sgn(d2), s3 = sgn(d3), s4 = sgn(d4);
  if (s1 * s2 < 0 && s3 * s4 < 0) return true;
  auto on_segment = [](const Segment& s, Point p) {
    return std::min(s.p.x, s.q.x) <= p.x && p.x <= std::max(s.p.x, s.q.x) &&
           std::min(s.p.y, s.q.y) <= p.y && p.y <= std::max(s.p.y, s.q.y);
  };
  if (s1 == 0 && on_segment(a, b.p)) return true;
  if (s2 == 0 && on_segment(a, b.q)) return true;
  if (s3 == 0 && on_segment(b, a.p)) return true;
  if (s4 == 0 && on_segment(b, a.q)) return true;
  return false;
}

bool intersects(const Segment& s, const Polygon& cell) noexcept {
  const auto v = cell.vertices();
  double xmin = v[0].x, xmax = v[0].x, ymin = v[0].y, ymax = v[0].y;
  for (const Point& p : v) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  if (std::max(s.p.x, s.q.x) < xmin || std::min(s.p.x, s.q.x) > xmax ||
      std::max(s.p.y, s.q.y) < ymin || std::min(s.p.y, s.q.y) > ymax) {
    return false;
  }
  if (cell.contains(s.p) || cell.contains(s.q)) return true;
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (intersects(s, Segment{v[i], v[(i + 1) % n]})) return true;
  }
  return false;
}

std::vector<double> edge_normal_angles(const Polygon& cell) {
  const auto v = cell.vertices();
  const std::size_t n = v.size();
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point e = v[(i + 1) % n] - v[i];
    out.push_back(wrap_half_turn(std::atan2(-e.x, e.y)));
  }
  return out;
}

}  // namespace celldiv
