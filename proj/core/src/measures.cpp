#include "celldiv/measures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "celldiv/errors.hpp"

namespace celldiv {

namespace {

constexpr int kGaussPoints = 20;
// Longest sub-interval of [0, pi) integrated by one Gauss–Legendre panel.
constexpr double kMaxPanel = std::numbers::pi / 16.0;

struct GaussRule {
  std::array<double, kGaussPoints> nodes{};
  std::array<double, kGaussPoints> weights{};
};

// Nodes and weights on [-1, 1] by Newton iteration on P_n.
GaussRule make_gauss_rule() {
  GaussRule rule;
  constexpr int n = kGaussPoints;
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

const GaussRule& gauss_rule() {
  static const GaussRule rule = make_gauss_rule();
  return rule;
}

double wrap_angle(double a) {
  a = std::fmod(a, std::numbers::pi);
  if (a < 0.0) a += std::numbers::pi;
  return a;
}

double integrate_pieces(const std::function<double(double)>& f, std::vector<double> cuts) {
  cuts.push_back(0.0);
  cuts.push_back(std::numbers::pi);
  for (double& c : cuts) c = std::clamp(wrap_angle(c), 0.0, std::numbers::pi);
  cuts.push_back(std::numbers::pi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double a, double b) { return b - a < 1e-15; }),
             cuts.end());

  const GaussRule& rule = gauss_rule();
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / kMaxPanel)));
    const double step = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
      const double lo = a + p * step;
      const double half = 0.5 * step;
      const double mid = lo + half;
      double sum = 0.0;
      for (int k = 0; k < kGaussPoints; ++k) sum += rule.weights[k] * f(mid + half * rule.nodes[k]);
      total += half * sum;
    }
  }
  return total;
}

}  // namespace

// ---------------------------------------------------------------------------
// DirectionalDistribution

DirectionalDistribution DirectionalDistribution::isotropic() { return {}; }

DirectionalDistribution DirectionalDistribution::atoms(std::vector<Atom> atoms) {
  if (atoms.empty()) throw std::invalid_argument("directional atoms must not be empty");
  double sum = 0.0;
  for (const Atom& a : atoms) {
    if (!(a.theta >= 0.0 && a.theta < std::numbers::pi)) {
      throw std::invalid_argument("directional atom angle must lie in [0, pi)");
    }
    if (!(a.weight > 0.0)) throw std::invalid_argument("directional atom weight must be positive");
    sum += a.weight;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument("directional atom weights must sum to 1");
  }
  const bool two_directions = std::any_of(atoms.begin(), atoms.end(), [&](const Atom& a) {
    return a.theta != atoms.front().theta;
  });
  if (!two_directions) {
    throw std::invalid_argument("directional distribution concentrated on one direction");
  }
  DirectionalDistribution d;
  d.atoms_ = std::move(atoms);
  return d;
}

DirectionalDistribution DirectionalDistribution::axis_aligned() {
  return atoms({{0.0, 0.5}, {std::numbers::pi / 2.0, 0.5}});
}

double DirectionalDistribution::sample(Rng& rng) const {
  if (is_isotropic()) return rng.uniform() * std::numbers::pi;
  double target = rng.uniform();
  for (const Atom& a : atoms_) {
    if (target < a.weight) return a.theta;
    target -= a.weight;
  }
  return atoms_.back().theta;
}

double DirectionalDistribution::integrate(const std::function<double(double)>& f,
                                          std::span<const double> breakpoints) const {
  if (is_isotropic()) {
    return integrate_pieces(f, {breakpoints.begin(), breakpoints.end()}) / std::numbers::pi;
  }
  double sum = 0.0;
  for (const Atom& a : atoms_) sum += a.weight * f(a.theta);
  return sum;
}

// ---------------------------------------------------------------------------
// HyperplaneMeasure

HyperplaneMeasure::HyperplaneMeasure(double intensity, DirectionalDistribution directions)
    : intensity_(intensity), directions_(std::move(directions)) {
  if (!(intensity > 0.0) || !std::isfinite(intensity)) {
    throw std::invalid_argument("hyperplane measure intensity must be positive and finite");
  }
}

MeasurePtr make_measure(double intensity, DirectionalDistribution directions) {
  return std::make_shared<const HyperplaneMeasure>(intensity, std::move(directions));
}

std::vector<double> support_breakpoints(const Polygon& a) { return edge_normal_angles(a); }

std::vector<double> support_breakpoints(const Polygon& a, const Polygon& b) {
  std::vector<double> out = edge_normal_angles(a);
  const std::vector<double> nb = edge_normal_angles(b);
  out.insert(out.end(), nb.begin(), nb.end());
  for (const Point& p : a.vertices()) {
    for (const Point& q : b.vertices()) {
      const Point d = p - q;
      if (d.x == 0.0 && d.y == 0.0) continue;
      out.push_back(wrap_angle(std::atan2(d.y, d.x) + std::numbers::pi / 2.0));
    }
  }
  return out;
}

double hitting_mass(const HyperplaneMeasure& measure, const Polygon& cell) {
  const DirectionalDistribution& dirs = measure.directions();
  if (dirs.is_isotropic()) return measure.intensity() * cell.perimeter() / std::numbers::pi;
  return measure.intensity() * dirs.integrate([&](double t) { return width(cell, t); });
}

double joint_hitting_mass(const HyperplaneMeasure& measure, const Polygon& a, const Polygon& b) {
  auto overlap = [&](double theta) {
    const OffsetRange ra = offset_range(a, theta);
    const OffsetRange rb = offset_range(b, theta);
    return std::max(0.0, std::min(ra.hi, rb.hi) - std::max(ra.lo, rb.lo));
  };
  const std::vector<double> cuts = support_breakpoints(a, b);
  return measure.intensity() * measure.directions().integrate(overlap, cuts);
}

Hyperplane sample_hitting(const HyperplaneMeasure& measure, const Polygon& cell, Rng& rng) {
  const DirectionalDistribution& dirs = measure.directions();
  double theta = 0.0;
  if (dirs.is_isotropic()) {
    const double envelope = cell.diameter();
    for (;;) {
      theta = rng.uniform() * std::numbers::pi;
      if (rng.uniform() * envelope <= width(cell, theta)) break;
    }
  } else {
    const auto atoms = dirs.atom_list();
    std::vector<double> weights(atoms.size());
    double total = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      weights[i] = atoms[i].weight * width(cell, atoms[i].theta);
      total += weights[i];
    }
    double target = rng.uniform() * total;
    std::size_t pick = atoms.size() - 1;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (target < weights[i]) {
        pick = i;
        break;
      }
      target -= weights[i];
    }
    theta = atoms[pick].theta;
  }
  const OffsetRange r = offset_range(cell, theta);
  return Hyperplane(theta, rng.uniform(r.lo, r.hi));
}

// ---------------------------------------------------------------------------
// MeasureOnWindow

MeasureOnWindow::MeasureOnWindow(MeasurePtr base, Polygon window)
    : base_(std::move(base)), window_(std::move(window)), total_(hitting_mass(*base_, window_)) {}

double hitting_prob(const MeasureOnWindow& restricted, const Polygon& probe) {
  if (!restricted.window().contains(probe)) {
    throw ContainmentViolation("probe polygon is not contained in the window");
  }
  return std::min(1.0, hitting_mass(restricted.base(), probe) / restricted.total());
}

}  // namespace celldiv
