#pragma once

// Translation-invariant line measures Λ = intensity · φ(dθ) × da on the
// upper half-circle parameterization of lines, with their hitting masses
// Λ([C]) and exact samplers for the restriction Λ_[C].

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "celldiv/geometry.hpp"
#include "celldiv/rng.hpp"

namespace celldiv {

class DirectionalDistribution {
 public:
  struct Atom {
    double theta;
    double weight;
    bool operator==(const Atom&) const = default;
  };

  /// Uniform density 1/pi on [0, pi).
  static DirectionalDistribution isotropic();
  /// Weights must be positive and sum to 1 within 1e-12; at least two
  /// distinct angles are required so the lines are not all parallel.
  static DirectionalDistribution atoms(std::vector<Atom> atoms);
  /// Equal weight on theta = 0 and theta = pi/2.
  static DirectionalDistribution axis_aligned();

  bool is_isotropic() const noexcept { return atoms_.empty(); }
  std::span<const Atom> atom_list() const noexcept { return atoms_; }

  double sample(Rng& rng) const;

  /// ∫ f(θ) φ(dθ). For the isotropic law the integral is split at the
  /// supplied angles, where f may have kinks, and each piece is integrated
  /// by Gauss–Legendre.
  double integrate(const std::function<double(double)>& f,
                   std::span<const double> breakpoints = {}) const;

  bool operator==(const DirectionalDistribution&) const = default;

 private:
  std::vector<Atom> atoms_;  // empty means isotropic
};

class HyperplaneMeasure {
 public:
  HyperplaneMeasure(double intensity, DirectionalDistribution directions);

  double intensity() const noexcept { return intensity_; }
  const DirectionalDistribution& directions() const noexcept { return directions_; }

  bool operator==(const HyperplaneMeasure&) const = default;

 private:
  double intensity_;
  DirectionalDistribution directions_;
};

using MeasurePtr = std::shared_ptr<const HyperplaneMeasure>;

MeasurePtr make_measure(double intensity, DirectionalDistribution directions);

/// Λ([C]) = intensity · ∫ width(C, θ) φ(dθ). Isotropic uses the Cauchy
/// formula intensity · perimeter / pi.
double hitting_mass(const HyperplaneMeasure& measure, const Polygon& cell);

/// Λ([A] ∩ [B]): mass of lines hitting both polygons.
double joint_hitting_mass(const HyperplaneMeasure& measure, const Polygon& a, const Polygon& b);

/// Draw from Λ_[C] = Λ(· ∩ [C]) / Λ([C]).
Hyperplane sample_hitting(const HyperplaneMeasure& measure, const Polygon& cell, Rng& rng);

/// Λ restricted to a window, with Λ([window]) cached.
class MeasureOnWindow {
 public:
  MeasureOnWindow(MeasurePtr base, Polygon window);

  const HyperplaneMeasure& base() const noexcept { return *base_; }
  const Polygon& window() const noexcept { return window_; }
  double total() const noexcept { return total_; }

 private:
  MeasurePtr base_;
  Polygon window_;
  double total_;
};

/// Λ_[window]([probe]). Throws ContainmentViolation if the probe leaves the window.
double hitting_prob(const MeasureOnWindow& restricted, const Polygon& probe);

/// Angles where a function built from support values of the given polygons
/// may have a kink: edge normals of each polygon and the directions
/// orthogonal to every cross-polygon vertex difference.
std::vector<double> support_breakpoints(const Polygon& a, const Polygon& b);
std::vector<double> support_breakpoints(const Polygon& a);

}  // namespace celldiv
