#pragma once

// Selection rules (cell life-time rates λ) and division rules (laws of the
// dividing line Λ_[C]) of a cell-division process.

#include <cstdint>
#include <string>
#include <variant>

#include "celldiv/geometry.hpp"
#include "celldiv/measures.hpp"
#include "celldiv/rng.hpp"

namespace celldiv {

namespace selection {
/// λ(C) = i-th intrinsic volume, i in {0, 1, 2}.
struct IntrinsicVolume {
  int index = 2;
};
/// λ(C) = number of vertices.
struct VertexCount {};
/// λ(C) = Λ*([C]).
struct HittingMeasure {
  MeasurePtr measure;
};
}  // namespace selection

namespace division {
/// Λ_[C] = Λ(· ∩ [C]) / Λ([C]).
struct RestrictedMeasure {
  MeasurePtr measure;
};
/// Uniform point in C, then a line through it with the given direction law.
struct PointDriven {
  DirectionalDistribution directions = DirectionalDistribution::isotropic();
};
}  // namespace division

using SelectionRule =
    std::variant<selection::IntrinsicVolume, selection::VertexCount, selection::HittingMeasure>;
using DivisionRule = std::variant<division::RestrictedMeasure, division::PointDriven>;

struct RulePair {
  SelectionRule selection;
  DivisionRule division;

  /// True iff selection and division are driven by the same measure object.
  bool is_stit() const noexcept;
};

RulePair make_stit(MeasurePtr measure);

/// Checks the rule parameters (intrinsic volume index, non-null measures).
void validate(const RulePair& rules);

std::string describe(const SelectionRule& rule);
std::string describe(const DivisionRule& rule);

/// λ(C) > 0.
double rate(const SelectionRule& rule, const Polygon& cell);

/// True for rules with C' ⊂ C ⇒ λ(C') ≤ λ(C).
bool is_monotone(const SelectionRule& rule) noexcept;

/// One draw of the dividing line of `cell`.
Hyperplane divide(const DivisionRule& rule, const Polygon& cell, Rng& rng);

/// Λ_[C]([probe]); the probe need not lie inside the cell.
double division_hit_prob(const DivisionRule& rule, const Polygon& cell, const Polygon& probe);

inline constexpr int kMaxDivisionAttempts = 100;

struct Division {
  Hyperplane line;
  Polygon plus;
  Polygon minus;
  Segment trace;
  int attempts;
};

/// Draws lines until one splits `cell` into two proper pieces. Throws
/// ReplicateAborted after `max_attempts` degenerate draws.
Division divide_cell(const DivisionRule& rule, const Polygon& cell, Rng& rng,
                     int max_attempts = kMaxDivisionAttempts);

/// Empirical k_C: max over `n_samples` isotropic hitting lines and both
/// pieces of rate(piece) / rate(cell).
double check_bound(const SelectionRule& rule, const Polygon& cell, int n_samples, Rng& rng);

}  // namespace celldiv
