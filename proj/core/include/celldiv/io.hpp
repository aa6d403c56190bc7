#pragma once

// Text formats: rule specifications, geometry dumps and experiment reports.
// The schemas are documented in docs/formats.md.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "celldiv/analysis.hpp"
#include "celldiv/engine.hpp"
#include "celldiv/geometry.hpp"
#include "celldiv/rules.hpp"

namespace celldiv {

/// Parses a rules object. Measures referenced by name from the "measures"
/// block are shared, so a selection and division naming the same measure
/// form a STIT pair. Unknown keys are rejected. Errors are ConfigError
/// prefixed with the JSON path of the offending field, rooted at `path`.
RulePair parse_rules(std::string_view json_text, const std::string& path = "rules");

/// Canonical JSON for a rule pair; round-trips through parse_rules,
/// including measure sharing.
std::string rules_to_json(const RulePair& rules);

/// Parses a JSON vertex list [[x, y], ...] into a validated polygon.
Polygon parse_polygon(std::string_view json_text, const std::string& path);
std::string polygon_to_json(std::span<const Point> vertices);

// ---------------------------------------------------------------------------
// Geometry dump: a header line followed by one line per segment.

struct GeometryDump {
  std::uint64_t seed = 0;
  std::string rules_json;
  std::vector<Point> window;
  double time = 0.0;
  std::vector<TimedSegment> segments;
};

GeometryDump make_geometry_dump(const ProcessState& state);
std::string write_geometry_dump(const GeometryDump& dump);
/// Throws ConfigError (with line number) on malformed input.
GeometryDump read_geometry_dump(std::string_view text);

// ---------------------------------------------------------------------------
// Reports

std::string report_to_json(const ConsistencyReport& report);
ConsistencyReport report_from_json(std::string_view text);
/// Fixed-width table for terminals.
std::string report_to_table(const ConsistencyReport& report);

std::string identities_to_json(const std::string& rules_json, std::span<const IdentityCheck> checks);
std::vector<IdentityCheck> identities_from_json(std::string_view text);

std::string rate_to_json(const std::string& rules_json, const std::vector<RateEstimate>& estimates,
                         double target);
std::vector<RateEstimate> rates_from_json(std::string_view text);

/// printf("%.17g")
std::string format_double(double v);

}  // namespace celldiv
