#include "celldiv/geometry.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "celldiv/errors.hpp"
#include "oracles.hpp"

namespace celldiv {
namespace {

using std::numbers::pi;
using std::numbers::sqrt2;

const Polygon kUnitSquare = Polygon::square(1.0);
const Polygon kTriangle({{0, 0}, {1, 0}, {0, 1}});

TEST(PolygonTest, CanonicalizesOrientationAndStart) {
  const Polygon cw({{1, 1}, {1, 0}, {0, 0}, {0, 1}});
  EXPECT_EQ(cw, kUnitSquare);
  EXPECT_EQ(kUnitSquare[0], (Point{0, 0}));
  EXPECT_DOUBLE_EQ(cw.area(), 1.0);
}

TEST(PolygonTest, DropsCollinearAndDuplicateVertices) {
  const Polygon p({{0, 0}, {0.5, 0}, {1, 0}, {1, 0}, {1, 1}, {0, 1}});
  EXPECT_EQ(p.size(), 4u);
  EXPECT_EQ(p, kUnitSquare);
}

TEST(PolygonTest, RejectsMalformedInput) {
  EXPECT_THROW(Polygon({{0, 0}, {1, 0}}), InvalidPolygon);
  EXPECT_THROW(Polygon({{0, 0}, {1, 0}, {2, 0}}), InvalidPolygon);
  // bow tie
  EXPECT_THROW(Polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), InvalidPolygon);
  // reflex vertex
  EXPECT_THROW(Polygon({{0, 0}, {2, 0}, {1, 0.5}, {2, 2}, {0, 2}}), InvalidPolygon);
  // pentagram: every turn is a left turn but the boundary winds twice
  std::vector<Point> star;
  for (int k = 0; k < 5; ++k) {
    const double a = 4.0 * pi * k / 5.0;
    star.push_back({std::cos(a), std::sin(a)});
  }
  EXPECT_THROW(Polygon{star}, InvalidPolygon);
  EXPECT_THROW(Polygon({{0, 0}, {1, 0}, {0, NAN}}), InvalidPolygon);
}

TEST(SplitTest, SquareByVerticalLine) {
  const SplitResult r = split(kUnitSquare, Hyperplane(0.0, 0.5));
  ASSERT_TRUE(r.plus && r.minus && r.trace);
  EXPECT_EQ(*r.plus, Polygon::rectangle(0.5, 0, 1, 1));
  EXPECT_EQ(*r.minus, Polygon::rectangle(0, 0, 0.5, 1));
  EXPECT_DOUBLE_EQ(r.trace->length(), 1.0);
}

TEST(SplitTest, NonHittingLineLeavesCellWhole) {
  const SplitResult r = split(kUnitSquare, Hyperplane(0.0, 2.0));
  EXPECT_FALSE(r.plus);
  ASSERT_TRUE(r.minus);
  EXPECT_EQ(*r.minus, kUnitSquare);
  EXPECT_FALSE(r.trace);

  const SplitResult s = split(kUnitSquare, Hyperplane(0.0, -1.0));
  ASSERT_TRUE(s.plus);
  EXPECT_FALSE(s.minus);
}

TEST(SplitTest, TriangleByDiagonalLine) {
  // x + y = 1/2 cuts off the corner triangle (0,0),(1/2,0),(0,1/2) of area 1/8.
  const SplitResult r = split(kTriangle, Hyperplane(pi / 4.0, sqrt2 / 4.0));
  ASSERT_TRUE(r.plus && r.minus);
  EXPECT_NEAR(r.minus->area(), 0.125, 1e-15);
  EXPECT_NEAR(r.plus->area(), 0.375, 1e-15);
  EXPECT_NEAR(r.plus->area() + r.minus->area(), 0.5, 1e-12 * 0.5);
  EXPECT_NEAR(r.trace->length(), sqrt2 / 2.0, 1e-15);
}

TEST(SplitTest, LineThroughVertexIsAProperSplit) {
  // The diagonal passes through two corners; both halves are triangles.
  const SplitResult r = split(kUnitSquare, Hyperplane(pi / 4.0, sqrt2 / 2.0));
  ASSERT_TRUE(r.plus && r.minus);
  EXPECT_EQ(r.plus->size(), 3u);
  EXPECT_EQ(r.minus->size(), 3u);
  EXPECT_NEAR(r.plus->area(), 0.5, 1e-15);
}

TEST(SplitTest, SliverRaisesDegenerateSplit) {
  const Hyperplane h(pi / 4.0, (2.0 - 1e-8) / sqrt2);
  EXPECT_THROW(split(kUnitSquare, h), DegenerateSplit);
}

TEST(SplitTest, ThinTriangleFarFromOriginIsAdditive) {
  // cut points rounded naively sit off their edges by half an ulp, which is
  // 5e-12 of this triangle's area
  const Polygon c({{3.5805588383036739, -0.83370975604520081},
                   {3.6436801884199221, -0.89112535766135859},
                   {3.5848511854512748, -0.83756919205373592}});
  const SplitResult r = split(c, Hyperplane(0.91113795441953194, 1.5330451785674379));
  ASSERT_TRUE(r.plus && r.minus);
  EXPECT_NEAR(r.plus->area() + r.minus->area(), c.area(), 1e-12 * c.area());
}

TEST(SupportTest, UnitSquare) {
  EXPECT_DOUBLE_EQ(support(kUnitSquare, 0.0, +1), 1.0);
  EXPECT_DOUBLE_EQ(support(kUnitSquare, 0.0, -1), 0.0);
  EXPECT_NEAR(support(kUnitSquare, pi / 4.0, +1), sqrt2, 1e-15);
}

TEST(WidthTest, UnitSquare) {
  EXPECT_DOUBLE_EQ(width(kUnitSquare, 0.0), 1.0);
  EXPECT_NEAR(width(kUnitSquare, pi / 4.0), sqrt2, 1e-15);
  EXPECT_NEAR(width(kUnitSquare, pi / 2.0), 1.0, 1e-15);
}

TEST(IntrinsicVolumesTest, Examples) {
  const IntrinsicVolumes sq = intrinsic_volumes(kUnitSquare);
  EXPECT_DOUBLE_EQ(sq.v0, 1.0);
  EXPECT_DOUBLE_EQ(sq.v1, 2.0);
  EXPECT_DOUBLE_EQ(sq.v2, 1.0);
  const IntrinsicVolumes rect = intrinsic_volumes(Polygon::rectangle(0, 0, 2, 3));
  EXPECT_DOUBLE_EQ(rect.v1, 5.0);
  EXPECT_DOUBLE_EQ(rect.v2, 6.0);
  const IntrinsicVolumes tri = intrinsic_volumes(kTriangle);
  EXPECT_NEAR(tri.v1, (2.0 + sqrt2) / 2.0, 1e-15);
  EXPECT_DOUBLE_EQ(tri.v2, 0.5);
}

TEST(VertexCountTest, Examples) {
  EXPECT_EQ(vertex_count(kUnitSquare), 4u);
  EXPECT_EQ(vertex_count(kTriangle), 3u);
  // opposite sides and adjacent sides: 4 + 4 and 3 + 5
  for (const Hyperplane& h : {Hyperplane(0.0, 0.3), Hyperplane(pi / 4.0, 0.4)}) {
    const SplitResult r = split(kUnitSquare, h);
    ASSERT_TRUE(r.plus && r.minus);
    EXPECT_EQ(vertex_count(*r.plus) + vertex_count(*r.minus), 8u);
  }
}

TEST(SampleUniformPointTest, SquareMeanAndContainment) {
  Rng rng(11);
  constexpr int n = 100000;
  double sx = 0.0, sy = 0.0;
  for (int i = 0; i < n; ++i) {
    const Point p = sample_uniform_point(kUnitSquare, rng);
    ASSERT_TRUE(kUnitSquare.contains(p, 1e-15));
    sx += p.x;
    sy += p.y;
  }
  const double three_sigma = 3.0 * (1.0 / std::sqrt(12.0)) / std::sqrt(double(n));
  EXPECT_NEAR(sx / n, 0.5, three_sigma);
  EXPECT_NEAR(sy / n, 0.5, three_sigma);
}

TEST(SampleUniformPointTest, TriangleCornerFraction) {
  Rng rng(12);
  constexpr int n = 100000;
  int below = 0;
  for (int i = 0; i < n; ++i) {
    const Point p = sample_uniform_point(kTriangle, rng);
    ASSERT_TRUE(kTriangle.contains(p, 1e-15));
    below += (p.x + p.y < 0.5);
  }
  EXPECT_TRUE(testing::within_binomial(double(below) / n, 0.25, n));
}

TEST(SampleUniformPointTest, RandomPolygonsStayInside) {
  Rng rng(13);
  for (int k = 0; k < 200; ++k) {
    const Polygon c = testing::random_convex(rng);
    for (int i = 0; i < 50; ++i) {
      ASSERT_TRUE(c.contains(sample_uniform_point(c, rng), 1e-12 * c.diameter()));
    }
  }
}

TEST(ClipSegmentTest, ChordAndMiss) {
  const auto chord = clip_segment(Segment{{-1, 0.5}, {2, 0.5}}, kUnitSquare);
  ASSERT_TRUE(chord);
  EXPECT_NEAR(chord->length(), 1.0, 1e-15);
  EXPECT_FALSE(clip_segment(Segment{{2, 0}, {3, 1}}, kUnitSquare));
  // Inside endpoints come back unchanged.
  const Segment inner{{0.1, 0.2}, {0.7, 0.3}};
  EXPECT_EQ(*clip_segment(inner, kUnitSquare), inner);
}

TEST(IntersectsTest, SegmentsAndPolygons) {
  EXPECT_TRUE(intersects(Segment{{0, 0}, {1, 1}}, Segment{{0, 1}, {1, 0}}));
  EXPECT_FALSE(intersects(Segment{{0, 0}, {1, 0}}, Segment{{0, 1}, {1, 1}}));
  EXPECT_TRUE(intersects(Segment{{0, 0}, {1, 0}}, Segment{{0.5, 0}, {0.5, 1}}));  // T-junction
  EXPECT_TRUE(intersects(Segment{{-1, 0.5}, {2, 0.5}}, kUnitSquare));
  EXPECT_TRUE(intersects(Segment{{0.2, 0.2}, {0.3, 0.3}}, kUnitSquare));
  EXPECT_FALSE(intersects(Segment{{2, 2}, {3, 3}}, kUnitSquare));
}

// --- randomized properties --------------------------------------------------

class SplitProperties : public ::testing::Test {
 protected:
  static constexpr int kCases = 10000;
};

TEST_F(SplitProperties, AdditivityVertexBoundAndPredicate) {
  Rng rng(2024);
  int proper = 0;
  for (int k = 0; k < kCases; ++k) {
    const Polygon c = testing::random_convex(rng);
    const double theta = rng.uniform() * pi;
    const auto [lo, hi] = testing::projection_range(c, theta);
    const Hyperplane h(theta, rng.uniform(lo, hi));
    SplitResult r;
    try {
      r = split(c, h);
    } catch (const DegenerateSplit&) {
      continue;
    }
    const double eps = kSnapTolerance * c.diameter();
    const bool strictly_inside = h.offset() > lo + eps && h.offset() < hi - eps;
    ASSERT_EQ(bool(r.plus && r.minus), strictly_inside);
    ASSERT_EQ(hits(c, h), strictly_inside);
    if (!(r.plus && r.minus)) continue;
    ++proper;
    ASSERT_NEAR(r.plus->area() + r.minus->area(), c.area(), 1e-12 * c.area());
    ASSERT_NEAR(r.plus->perimeter() + r.minus->perimeter(),
                c.perimeter() + 2.0 * r.trace->length(), 1e-10);
    ASSERT_LE(r.plus->size(), c.size() + 2);
    ASSERT_LE(r.minus->size(), c.size() + 2);
    // pieces lie on the right sides
    for (const Point& v : r.plus->vertices()) ASSERT_GE(h.signed_distance(v), -1e-9);
    for (const Point& v : r.minus->vertices()) ASSERT_LE(h.signed_distance(v), 1e-9);
    // pieces re-validate (convexity preserved)
    ASSERT_NO_THROW(Polygon(std::vector<Point>(r.plus->vertices().begin(), r.plus->vertices().end())));
  }
  EXPECT_GT(proper, kCases * 9 / 10);
}

TEST_F(SplitProperties, WidthIsTranslationInvariant) {
  Rng rng(77);
  for (int k = 0; k < kCases; ++k) {
    const Polygon c = testing::random_convex(rng);
    const Point shift{rng.uniform(-10, 10), rng.uniform(-10, 10)};
    const Polygon moved = c.translated(shift);
    const double theta = rng.uniform() * pi;
    ASSERT_NEAR(width(c, theta), width(moved, theta), 1e-12);
  }
}

}  // namespace
}  // namespace celldiv
