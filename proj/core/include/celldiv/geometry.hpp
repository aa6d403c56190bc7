#pragma once

// Convex polygon primitives for planar cell division.
//
// Polygons are strictly convex, counter-clockwise and canonicalized so that
// the vertex list starts at the lexicographically smallest vertex. Two
// polygons built from the same vertex set compare equal regardless of the
// orientation or starting vertex they were given in.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "celldiv/rng.hpp"

namespace celldiv {

/// Snap tolerance, relative to the diameter of the polygon being processed.
inline constexpr double kSnapTolerance = 1e-12;

/// Pieces smaller than this fraction of the parent area raise DegenerateSplit.
inline constexpr double kSliverFraction = 1e-14;

struct Point {
  double x = 0.0;
  double y = 0.0;

  constexpr bool operator==(const Point&) const = default;
  constexpr auto operator<=>(const Point&) const = default;
};

constexpr Point operator+(Point a, Point b) noexcept { return {a.x + b.x, a.y + b.y}; }
constexpr Point operator-(Point a, Point b) noexcept { return {a.x - b.x, a.y - b.y}; }
constexpr Point operator*(double s, Point a) noexcept { return {s * a.x, s * a.y}; }
constexpr double dot(Point a, Point b) noexcept { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point a, Point b) noexcept { return a.x * b.y - a.y * b.x; }
double norm(Point a) noexcept;
double distance(Point a, Point b) noexcept;

/// Unit normal (cos theta, sin theta) of a line direction.
Point unit_normal(double theta) noexcept;

class Polygon {
 public:
  /// Validates and canonicalizes. Accepts either orientation; drops
  /// duplicate and collinear vertices within the snap tolerance. Throws
  /// InvalidPolygon for non-finite, non-convex, self-intersecting or
  /// zero-area input.
  explicit Polygon(std::vector<Point> vertices);

  static Polygon rectangle(double x0, double y0, double x1, double y1);
  static Polygon square(double side, Point lower_left = {0.0, 0.0});
  /// Square of the given side centered at `center`.
  static Polygon centered_square(double side, Point center = {0.0, 0.0});
  static Polygon regular(Point center, double radius, int sides, double phase = 0.0);

  std::span<const Point> vertices() const noexcept { return vertices_; }
  std::size_t size() const noexcept { return vertices_.size(); }
  const Point& operator[](std::size_t i) const noexcept { return vertices_[i]; }

  double area() const noexcept { return area_; }
  double perimeter() const noexcept;
  /// Largest vertex-pair distance.
  double diameter() const noexcept { return diameter_; }
  Point centroid() const noexcept;

  /// Closed containment with an absolute tolerance.
  bool contains(Point p, double tol = 0.0) const noexcept;
  /// Vertex-wise containment, tolerance relative to this polygon's diameter.
  bool contains(const Polygon& other) const noexcept;

  Polygon translated(Point offset) const;
  Polygon scaled(double factor, Point about) const;

  friend bool operator==(const Polygon& a, const Polygon& b) noexcept {
    return a.vertices_ == b.vertices_;
  }

 private:
  std::vector<Point> vertices_;
  double area_ = 0.0;
  double diameter_ = 0.0;
};

/// The line {x : <x, u> = offset}, u = (cos theta, sin theta), theta in [0, pi).
/// The positive half-plane is <x, u> >= offset.
class Hyperplane {
 public:
  Hyperplane(double theta, double offset);
  /// Line with normal angle `theta` through `p`.
  static Hyperplane through(Point p, double theta);

  double theta() const noexcept { return theta_; }
  double offset() const noexcept { return offset_; }
  Point normal() const noexcept { return unit_normal(theta_); }
  double signed_distance(Point p) const noexcept { return dot(p, normal()) - offset_; }

 private:
  double theta_;
  double offset_;
};

struct Segment {
  Point p;
  Point q;

  double length() const noexcept { return distance(p, q); }
  constexpr bool operator==(const Segment&) const = default;
};

struct SplitResult {
  std::optional<Polygon> plus;
  std::optional<Polygon> minus;
  std::optional<Segment> trace;
};

/// Splits `cell` into cell ∩ h⁺ and cell ∩ h⁻. A side with empty interior is
/// returned as nullopt; the trace h ∩ cell is present only when both sides
/// are. Throws DegenerateSplit when a nonempty piece is a sliver.
SplitResult split(const Polygon& cell, const Hyperplane& h);

/// Support function h_C(sign * u(theta)).
double support(const Polygon& cell, double theta, int sign) noexcept;
/// Length of the projection of `cell` onto the direction u(theta).
double width(const Polygon& cell, double theta) noexcept;

/// Offset interval [lo, hi] of lines with normal angle theta hitting `cell`.
struct OffsetRange {
  double lo;
  double hi;
  double length() const noexcept { return hi - lo; }
};
OffsetRange offset_range(const Polygon& cell, double theta) noexcept;

bool hits(const Polygon& cell, const Hyperplane& h) noexcept;

struct IntrinsicVolumes {
  double v0;  // Euler characteristic
  double v1;  // half the perimeter
  double v2;  // area
};
IntrinsicVolumes intrinsic_volumes(const Polygon& cell) noexcept;

std::size_t vertex_count(const Polygon& cell) noexcept;

/// Uniform point in `cell` with respect to area.
Point sample_uniform_point(const Polygon& cell, Rng& rng);

/// Convex hull (Andrew's monotone chain). Throws InvalidPolygon when the
/// points are collinear.
Polygon convex_hull(std::span<const Point> points);

/// Vertices of `cell` ∩ {<x,u> >= lo} ∩ {<x,u> <= hi}; may be empty.
std::vector<Point> clip_to_slab(const Polygon& cell, double theta, double lo, double hi);

/// Area enclosed by a vertex ring (shoelace, absolute value).
double ring_area(std::span<const Point> ring) noexcept;

/// Part of `s` inside the closed polygon, or nullopt. Endpoints already
/// inside (within tolerance) are returned bit-for-bit unchanged.
std::optional<Segment> clip_segment(const Segment& s, const Polygon& cell);

bool intersects(const Segment& a, const Segment& b) noexcept;
bool intersects(const Segment& s, const Polygon& cell) noexcept;

/// Angles in [0, pi) of the edge normals of `cell` (where the supporting
/// vertex of the direction or its opposite changes).
std::vector<double> edge_normal_angles(const Polygon& cell);

}  // namespace celldiv
