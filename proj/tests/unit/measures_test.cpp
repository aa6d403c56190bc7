#include "celldiv/measures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "celldiv/errors.hpp"
#include "oracles.hpp"

namespace celldiv {
namespace {

using std::numbers::pi;

const Polygon kUnitSquare = Polygon::square(1.0);

TEST(DirectionalDistributionTest, RejectsBadAtoms) {
  using A = DirectionalDistribution::Atom;
  EXPECT_THROW(DirectionalDistribution::atoms({}), std::invalid_argument);
  EXPECT_THROW(DirectionalDistribution::atoms({{0.0, 0.5}, {1.0, 0.4}}), std::invalid_argument);
  EXPECT_THROW(DirectionalDistribution::atoms({A{0.0, 1.5}, A{1.0, -0.5}}), std::invalid_argument);
  EXPECT_THROW(DirectionalDistribution::atoms({A{0.0, 0.5}, A{0.0, 0.5}}), std::invalid_argument);
  EXPECT_THROW(DirectionalDistribution::atoms({A{pi, 0.5}, A{1.0, 0.5}}), std::invalid_argument);
  EXPECT_NO_THROW(DirectionalDistribution::atoms({A{0.0, 0.25}, A{1.0, 0.75}}));
}

TEST(DirectionalDistributionTest, IsotropicIntegration) {
  const auto iso = DirectionalDistribution::isotropic();
  EXPECT_NEAR(iso.integrate([](double t) { return std::cos(t) * std::cos(t); }), 0.5, 1e-14);
  EXPECT_NEAR(iso.integrate([](double) { return 1.0; }), 1.0, 1e-14);
  // |cos| has a kink at pi/2
  const double kink[] = {pi / 2.0};
  EXPECT_NEAR(iso.integrate([](double t) { return std::abs(std::cos(t)); }, kink), 2.0 / pi, 1e-14);
}

TEST(DirectionalDistributionTest, AtomSamplingFrequencies) {
  const auto d = DirectionalDistribution::atoms({{0.0, 0.2}, {1.0, 0.3}, {2.0, 0.5}});
  Rng rng(5);
  constexpr int n = 100000;
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < n; ++i) {
    const double t = d.sample(rng);
    counts[t == 0.0 ? 0 : (t == 1.0 ? 1 : 2)]++;
  }
  EXPECT_TRUE(testing::within_binomial(counts[0] / double(n), 0.2, n));
  EXPECT_TRUE(testing::within_binomial(counts[1] / double(n), 0.3, n));
  EXPECT_TRUE(testing::within_binomial(counts[2] / double(n), 0.5, n));
}

TEST(HyperplaneMeasureTest, RejectsBadIntensity) {
  EXPECT_THROW(HyperplaneMeasure(0.0, DirectionalDistribution::isotropic()), std::invalid_argument);
  EXPECT_THROW(HyperplaneMeasure(-1.0, DirectionalDistribution::isotropic()), std::invalid_argument);
  EXPECT_THROW(HyperplaneMeasure(INFINITY, DirectionalDistribution::isotropic()),
               std::invalid_argument);
}

TEST(HittingMassTest, IsotropicUnitSquare) {
  const HyperplaneMeasure m(1.0, DirectionalDistribution::isotropic());
  EXPECT_NEAR(hitting_mass(m, kUnitSquare), 4.0 / pi, 1e-15);
  // frozen trapezoid oracle value (256 panels)
  EXPECT_NEAR(testing::mean_width_trapezoid(kUnitSquare), 1.2732235657, 1e-10);
  EXPECT_NEAR(hitting_mass(m, kUnitSquare), testing::mean_width_trapezoid(kUnitSquare), 2e-5);
}

TEST(HittingMassTest, IsotropicMatchesQuadratureOnRandomPolygons) {
  Rng rng(31);
  const HyperplaneMeasure m(2.5, DirectionalDistribution::isotropic());
  for (int k = 0; k < 100; ++k) {
    const Polygon c = testing::random_convex(rng);
    const double oracle = 2.5 * testing::mean_width_trapezoid(c, 8192);
    EXPECT_NEAR(hitting_mass(m, c), oracle, 1e-6 * oracle);
  }
}

TEST(HittingMassTest, AtomsAreExactWeightedWidths) {
  const HyperplaneMeasure m(3.0, DirectionalDistribution::axis_aligned());
  EXPECT_DOUBLE_EQ(hitting_mass(m, Polygon::rectangle(0, 0, 2, 1)), 3.0 * (0.5 * 2 + 0.5 * 1));
  const auto d = DirectionalDistribution::atoms({{0.3, 0.6}, {2.0, 0.4}});
  const HyperplaneMeasure m2(1.0, d);
  const Polygon tri({{0, 0}, {1, 0}, {0, 1}});
  const auto [l0, h0] = testing::projection_range(tri, 0.3);
  const auto [l1, h1] = testing::projection_range(tri, 2.0);
  EXPECT_NEAR(hitting_mass(m2, tri), 0.6 * (h0 - l0) + 0.4 * (h1 - l1), 1e-15);
}

TEST(HittingMassTest, MonotoneUnderInclusion) {
  Rng rng(61);
  const MeasurePtr measures[] = {
      make_measure(1.0, DirectionalDistribution::isotropic()),
      make_measure(2.5, DirectionalDistribution::atoms({{0.1, 0.2}, {1.3, 0.5}, {2.9, 0.3}}))};
  int checked = 0;
  for (int k = 0; k < 1000; ++k) {
    const Polygon c = testing::random_convex(rng);
    std::vector<Point> inner;
    for (int i = 0; i < 3 + k % 6; ++i) inner.push_back(sample_uniform_point(c, rng));
    Polygon b = c;
    try {
      b = convex_hull(inner);
    } catch (const InvalidPolygon&) {
      continue;  // collinear draw
    }
    ++checked;
    for (const MeasurePtr& m : measures) {
      EXPECT_LE(hitting_mass(*m, b), hitting_mass(*m, c) * (1.0 + 1e-12)) << "case " << k;
    }
  }
  EXPECT_GT(checked, 990);
}

TEST(JointHittingMassTest, NestedReducesToInner) {
  const HyperplaneMeasure m(1.0, DirectionalDistribution::isotropic());
  const Polygon inner = Polygon::centered_square(0.5, {0.5, 0.5});
  EXPECT_NEAR(joint_hitting_mass(m, kUnitSquare, inner), hitting_mass(m, inner), 1e-13);
  EXPECT_NEAR(hitting_mass(m, inner), 2.0 / pi, 1e-15);
}

TEST(JointHittingMassTest, MatchesQuadratureOnRandomPairs) {
  Rng rng(32);
  for (const auto& dirs : {DirectionalDistribution::isotropic(),
                           DirectionalDistribution::atoms({{0.1, 0.5}, {1.7, 0.5}})}) {
    const HyperplaneMeasure m(1.0, dirs);
    for (int k = 0; k < 40; ++k) {
      const Polygon a = testing::random_convex(rng);
      const Polygon b = testing::random_convex(rng);
      double oracle;
      if (dirs.is_isotropic()) {
        oracle = testing::joint_mean_overlap_trapezoid(a, b);
      } else {
        oracle = 0.0;
        for (const auto& atom : dirs.atom_list()) {
          const auto [la, ha] = testing::projection_range(a, atom.theta);
          const auto [lb, hb] = testing::projection_range(b, atom.theta);
          oracle += atom.weight * std::max(0.0, std::min(ha, hb) - std::max(la, lb));
        }
      }
      EXPECT_NEAR(joint_hitting_mass(m, a, b), oracle, 1e-6 * (1.0 + oracle));
      EXPECT_NEAR(joint_hitting_mass(m, a, b), joint_hitting_mass(m, b, a), 1e-12);
    }
  }
}

TEST(SampleHittingTest, AxisAlignedAngleFrequency) {
  const HyperplaneMeasure m(1.0, DirectionalDistribution::axis_aligned());
  const Polygon rect = Polygon::rectangle(0, 0, 2, 1);
  Rng rng(41);
  constexpr int n = 100000;
  int vertical = 0;
  for (int i = 0; i < n; ++i) {
    const Hyperplane h = sample_hitting(m, rect, rng);
    ASSERT_TRUE(hits(rect, h));
    vertical += (h.theta() == 0.0);
  }
  EXPECT_TRUE(testing::within_binomial(vertical / double(n), 2.0 / 3.0, n));
}

TEST(SampleHittingTest, IsotropicSquareAngleAndOffsetLaws) {
  const HyperplaneMeasure m(1.0, DirectionalDistribution::isotropic());
  Rng rng(42);
  constexpr int n = 50000;
  std::vector<double> angles, rel_offsets;
  for (int i = 0; i < n; ++i) {
    const Hyperplane h = sample_hitting(m, kUnitSquare, rng);
    angles.push_back(h.theta());
    const auto [lo, hi] = testing::projection_range(kUnitSquare, h.theta());
    rel_offsets.push_back((h.offset() - lo) / (hi - lo));
  }
  // angle density ∝ width(θ) = |cos θ| + sin θ on [0, pi)
  const auto angle_cdf = [](double t) {
    const double abs_cos_int = t <= pi / 2 ? std::sin(t) : 2.0 - std::sin(t);
    return (abs_cos_int + 1.0 - std::cos(t)) / 4.0;
  };
  EXPECT_LT(testing::ks_distance(angles, angle_cdf), testing::ks_critical_1pct(n));
  EXPECT_LT(testing::ks_distance(rel_offsets, [](double u) { return u; }),
            testing::ks_critical_1pct(n));
}

TEST(SampleHittingTest, ProbeHitFrequencyMatchesHittingProb) {
  const MeasurePtr m = make_measure(1.0, DirectionalDistribution::isotropic());
  const MeasureOnWindow restricted(m, kUnitSquare);
  const Polygon probe = Polygon::centered_square(0.5, {0.5, 0.5});
  EXPECT_NEAR(hitting_prob(restricted, probe), 0.5, 1e-15);
  Rng rng(43);
  constexpr int n = 100000;
  int hit = 0;
  for (int i = 0; i < n; ++i) hit += hits(probe, sample_hitting(*m, kUnitSquare, rng));
  EXPECT_TRUE(testing::within_binomial(hit / double(n), 0.5, n));
}

TEST(HittingProbTest, ProbeOutsideWindowThrows) {
  const MeasureOnWindow restricted(make_measure(1.0, DirectionalDistribution::isotropic()),
                                   kUnitSquare);
  EXPECT_THROW(hitting_prob(restricted, Polygon::square(2.0)), ContainmentViolation);
  EXPECT_NEAR(restricted.total(), 4.0 / pi, 1e-15);
}

}  // namespace
}  // namespace celldiv
