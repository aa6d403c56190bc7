#include "celldiv/rules.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "celldiv/errors.hpp"

namespace celldiv {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string describe_directions(const DirectionalDistribution& d) {
  if (d.is_isotropic()) return "isotropic";
  std::ostringstream out;
  out << "atoms[";
  bool first = true;
  for (const auto& a : d.atom_list()) {
    out << (first ? "" : ", ") << a.theta << ":" << a.weight;
    first = false;
  }
  out << "]";
  return out.str();
}

std::string describe_measure(const MeasurePtr& m) {
  std::ostringstream out;
  out << "Λ(intensity " << m->intensity() << ", " << describe_directions(m->directions()) << ")";
  return out.str();
}

}  // namespace

bool RulePair::is_stit() const noexcept {
  const auto* s = std::get_if<selection::HittingMeasure>(&selection);
  const auto* d = std::get_if<division::RestrictedMeasure>(&division);
  return s != nullptr && d != nullptr && s->measure && s->measure == d->measure;
}

RulePair make_stit(MeasurePtr measure) {
  return {selection::HittingMeasure{measure}, division::RestrictedMeasure{measure}};
}

void validate(const RulePair& rules) {
  std::visit(overloaded{
                 [](const selection::IntrinsicVolume& r) {
                   if (r.index < 0 || r.index > 2) {
                     throw std::invalid_argument("intrinsic volume index must be 0, 1 or 2");
                   }
                 },
                 [](const selection::VertexCount&) {},
                 [](const selection::HittingMeasure& r) {
                   if (!r.measure) throw std::invalid_argument("selection measure is null");
                 },
             },
             rules.selection);
  if (const auto* d = std::get_if<division::RestrictedMeasure>(&rules.division); d && !d->measure) {
    throw std::invalid_argument("division measure is null");
  }
}

std::string describe(const SelectionRule& rule) {
  return std::visit(
      overloaded{
          [](const selection::IntrinsicVolume& r) {
            return "intrinsic_volume(" + std::to_string(r.index) + ")";
          },
          [](const selection::VertexCount&) { return std::string("vertex_count"); },
          [](const selection::HittingMeasure& r) {
            return "hitting_measure(" + describe_measure(r.measure) + ")";
          },
      },
      rule);
}

std::string describe(const DivisionRule& rule) {
  return std::visit(
      overloaded{
          [](const division::RestrictedMeasure& r) {
            return "restricted_measure(" + describe_measure(r.measure) + ")";
          },
          [](const division::PointDriven& r) {
            return "point_driven(" + describe_directions(r.directions) + ")";
          },
      },
      rule);
}

double rate(const SelectionRule& rule, const Polygon& cell) {
  return std::visit(overloaded{
                        [&](const selection::IntrinsicVolume& r) {
                          const IntrinsicVolumes v = intrinsic_volumes(cell);
                          return r.index == 0 ? v.v0 : (r.index == 1 ? v.v1 : v.v2);
                        },
                        [&](const selection::VertexCount&) {
                          return static_cast<double>(vertex_count(cell));
                        },
                        [&](const selection::HittingMeasure& r) {
                          return hitting_mass(*r.measure, cell);
                        },
                    },
                    rule);
}

bool is_monotone(const SelectionRule& rule) noexcept {
  return !std::holds_alternative<selection::VertexCount>(rule);
}

Hyperplane divide(const DivisionRule& rule, const Polygon& cell, Rng& rng) {
  return std::visit(overloaded{
                        [&](const division::RestrictedMeasure& r) {
                          return sample_hitting(*r.measure, cell, rng);
                        },
                        [&](const division::PointDriven& r) {
                          const Point x = sample_uniform_point(cell, rng);
                          return Hyperplane::through(x, r.directions.sample(rng));
                        },
                    },
                    rule);
}

double division_hit_prob(const DivisionRule& rule, const Polygon& cell, const Polygon& probe) {
  return std::visit(
      overloaded{
          [&](const division::RestrictedMeasure& r) {
            return joint_hitting_mass(*r.measure, probe, cell) / hitting_mass(*r.measure, cell);
          },
          [&](const division::PointDriven& r) {
            // A line through X with normal angle θ hits the probe iff
            // <X, u> falls in the probe's offset range, so the conditional
            // probability is the area fraction of the cell inside that slab.
            auto slab_fraction = [&](double theta) {
              const OffsetRange range = offset_range(probe, theta);
              return ring_area(clip_to_slab(cell, theta, range.lo, range.hi)) / cell.area();
            };
            const std::vector<double> cuts = support_breakpoints(cell, probe);
            return r.directions.integrate(slab_fraction, cuts);
          },
      },
      rule);
}

Division divide_cell(const DivisionRule& rule, const Polygon& cell, Rng& rng, int max_attempts) {
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    const Hyperplane line = divide(rule, cell, rng);
    try {
      SplitResult parts = split(cell, line);
      if (parts.plus && parts.minus) {
        return {line, std::move(*parts.plus), std::move(*parts.minus), *parts.trace, attempt};
      }
    } catch (const DegenerateSplit&) {
    }
  }
  throw ReplicateAborted("no proper division of a cell after " + std::to_string(max_attempts) +
                         " attempts");
}

double check_bound(const SelectionRule& rule, const Polygon& cell, int n_samples, Rng& rng) {
  if (n_samples < 1) throw std::invalid_argument("check_bound needs at least one sample");
  static const HyperplaneMeasure reference(1.0, DirectionalDistribution::isotropic());
  const double base = rate(rule, cell);
  double k_hat = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    SplitResult parts;
    try {
      parts = split(cell, sample_hitting(reference, cell, rng));
    } catch (const DegenerateSplit&) {
      continue;
    }
    for (const auto& piece : {parts.plus, parts.minus}) {
      if (piece) k_hat = std::max(k_hat, rate(rule, *piece) / base);
    }
  }
  return k_hat;
}

}  // namespace celldiv
