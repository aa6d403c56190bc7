#include "celldiv/io.hpp"

#include <cstdio>
#include <iomanip>
#include <map>
#include <sstream>

#include "celldiv/errors.hpp"
#include "json.hpp"

namespace celldiv {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr const char* kDumpFormat = "celldiv-geometry";
constexpr const char* kReportFormat = "celldiv-consistency-report";
constexpr const char* kIdentityFormat = "celldiv-identity-report";
constexpr const char* kRateFormat = "celldiv-rate-report";
constexpr int kFormatVersion = 1;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError(path + ": " + message);
}

json parse_json(std::string_view text, const std::string& path) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(path, std::string("malformed JSON (") + e.what() + ")");
  }
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) fail(path + "." + key, "unknown key");
  }
}

const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing required field");
  return *it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

std::vector<Point> points_from(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected a vertex list [[x, y], ...]");
  std::vector<Point> pts;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    if (!v[i].is_array() || v[i].size() != 2) fail(p, "expected [x, y]");
    pts.push_back({as_number(v[i][0], p + "[0]"), as_number(v[i][1], p + "[1]")});
  }
  return pts;
}

Polygon polygon_from(const json& v, const std::string& path) {
  try {
    return Polygon(points_from(v, path));
  } catch (const InvalidPolygon& e) {
    fail(path, e.what());
  }
}

ordered_json points_json(std::span<const Point> pts) {
  ordered_json arr = ordered_json::array();
  for (const Point& p : pts) arr.push_back({p.x, p.y});
  return arr;
}

DirectionalDistribution directions_from(const json& v, const std::string& path) {
  if (v.is_string()) {
    if (v.get<std::string>() == "isotropic") return DirectionalDistribution::isotropic();
    fail(path, "expected \"isotropic\" or a list of [theta, weight]");
  }
  if (!v.is_array()) fail(path, "expected \"isotropic\" or a list of [theta, weight]");
  std::vector<DirectionalDistribution::Atom> atoms;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    if (!v[i].is_array() || v[i].size() != 2) fail(p, "expected [theta, weight]");
    atoms.push_back({as_number(v[i][0], p + "[0]"), as_number(v[i][1], p + "[1]")});
  }
  try {
    return DirectionalDistribution::atoms(std::move(atoms));
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
}

ordered_json directions_json(const DirectionalDistribution& d) {
  if (d.is_isotropic()) return "isotropic";
  ordered_json arr = ordered_json::array();
  for (const auto& a : d.atom_list()) arr.push_back({a.theta, a.weight});
  return arr;
}

MeasurePtr measure_from(const json& v, const std::string& path) {
  check_keys(v, {"intensity", "directions"}, path);
  const double intensity = as_number(require(v, "intensity", path), path + ".intensity");
  auto dirs = directions_from(require(v, "directions", path), path + ".directions");
  try {
    return make_measure(intensity, std::move(dirs));
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
}

ordered_json measure_json(const HyperplaneMeasure& m) {
  ordered_json out;
  out["intensity"] = m.intensity();
  out["directions"] = directions_json(m.directions());
  return out;
}

std::uint64_t as_seed(const json& v, const std::string& path) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    fail(path, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Rules

RulePair parse_rules(std::string_view json_text, const std::string& path) {
  const json root = parse_json(json_text, path);
  check_keys(root, {"measures", "selection", "division"}, path);

  std::map<std::string, MeasurePtr> named;
  if (auto it = root.find("measures"); it != root.end()) {
    if (!it->is_object()) fail(path + ".measures", "expected an object of named measures");
    for (const auto& [name, spec] : it->items()) {
      named[name] = measure_from(spec, path + ".measures." + name);
    }
  }
  auto measure_ref = [&](const json& v, const std::string& p) -> MeasurePtr {
    if (v.is_string()) {
      auto it = named.find(v.get<std::string>());
      if (it == named.end()) fail(p, "unknown measure '" + v.get<std::string>() + "'");
      return it->second;
    }
    return measure_from(v, p);
  };

  RulePair rules{selection::VertexCount{}, division::PointDriven{}};

  const std::string sp = path + ".selection";
  const json& sel = require(root, "selection", path);
  if (!sel.is_object()) fail(sp, "expected an object");
  const std::string skind = as_string(require(sel, "kind", sp), sp + ".kind");
  if (skind == "intrinsic_volume") {
    check_keys(sel, {"kind", "index"}, sp);
    const json& idx = require(sel, "index", sp);
    if (!idx.is_number_integer() || idx.get<int>() < 0 || idx.get<int>() > 2) {
      fail(sp + ".index", "expected 0, 1 or 2");
    }
    rules.selection = selection::IntrinsicVolume{idx.get<int>()};
  } else if (skind == "vertex_count") {
    check_keys(sel, {"kind"}, sp);
    rules.selection = selection::VertexCount{};
  } else if (skind == "hitting_measure") {
    check_keys(sel, {"kind", "measure"}, sp);
    rules.selection = selection::HittingMeasure{measure_ref(require(sel, "measure", sp), sp + ".measure")};
  } else {
    fail(sp + ".kind", "unknown selection rule '" + skind + "'");
  }

  const std::string dp = path + ".division";
  const json& div = require(root, "division", path);
  if (!div.is_object()) fail(dp, "expected an object");
  const std::string dkind = as_string(require(div, "kind", dp), dp + ".kind");
  if (dkind == "restricted_measure") {
    check_keys(div, {"kind", "measure"}, dp);
    rules.division = division::RestrictedMeasure{measure_ref(require(div, "measure", dp), dp + ".measure")};
  } else if (dkind == "point_driven") {
    check_keys(div, {"kind", "directions"}, dp);
    division::PointDriven pd;
    if (auto it = div.find("directions"); it != div.end()) {
      pd.directions = directions_from(*it, dp + ".directions");
    }
    rules.division = pd;
  } else {
    fail(dp + ".kind", "unknown division rule '" + dkind + "'");
  }
  return rules;
}

std::string rules_to_json(const RulePair& rules) {
  ordered_json measures = ordered_json::object();
  std::vector<const HyperplaneMeasure*> seen;
  auto name_of = [&](const MeasurePtr& m) {
    for (std::size_t i = 0; i < seen.size(); ++i) {
      if (seen[i] == m.get()) return "m" + std::to_string(i);
    }
    seen.push_back(m.get());
    const std::string name = "m" + std::to_string(seen.size() - 1);
    measures[name] = measure_json(*m);
    return name;
  };

  ordered_json sel;
  if (const auto* r = std::get_if<selection::IntrinsicVolume>(&rules.selection)) {
    sel["kind"] = "intrinsic_volume";
    sel["index"] = r->index;
  } else if (std::holds_alternative<selection::VertexCount>(rules.selection)) {
    sel["kind"] = "vertex_count";
  } else {
    sel["kind"] = "hitting_measure";
    sel["measure"] = name_of(std::get<selection::HittingMeasure>(rules.selection).measure);
  }

  ordered_json div;
  if (const auto* r = std::get_if<division::RestrictedMeasure>(&rules.division)) {
    div["kind"] = "restricted_measure";
    div["measure"] = name_of(r->measure);
  } else {
    div["kind"] = "point_driven";
    div["directions"] = directions_json(std::get<division::PointDriven>(rules.division).directions);
  }

  ordered_json out;
  if (!measures.empty()) out["measures"] = measures;
  out["selection"] = sel;
  out["division"] = div;
  return out.dump();
}

Polygon parse_polygon(std::string_view json_text, const std::string& path) {
  return polygon_from(parse_json(json_text, path), path);
}

std::string polygon_to_json(std::span<const Point> vertices) { return points_json(vertices).dump(); }

// ---------------------------------------------------------------------------
// Geometry dump

GeometryDump make_geometry_dump(const ProcessState& state) {
  GeometryDump dump;
  dump.seed = state.seed();
  dump.rules_json = rules_to_json(state.rules());
  dump.window.assign(state.window().vertices().begin(), state.window().vertices().end());
  dump.time = state.clock();
  dump.segments.assign(state.segments().begin(), state.segments().end());
  return dump;
}

std::string write_geometry_dump(const GeometryDump& dump) {
  ordered_json header;
  header["format"] = kDumpFormat;
  header["version"] = kFormatVersion;
  header["seed"] = dump.seed;
  header["rules"] = ordered_json::parse(dump.rules_json);
  header["window"] = points_json(dump.window);
  header["time"] = dump.time;
  header["segment_count"] = dump.segments.size();

  std::string out = header.dump();
  out += '\n';
  for (const TimedSegment& s : dump.segments) {
    out += "{\"px\":" + format_double(s.segment.p.x) + ",\"py\":" + format_double(s.segment.p.y) +
           ",\"qx\":" + format_double(s.segment.q.x) + ",\"qy\":" + format_double(s.segment.q.y) +
           ",\"birth_time\":" + format_double(s.birth_time) + "}\n";
  }
  return out;
}

GeometryDump read_geometry_dump(std::string_view text) {
  GeometryDump dump;
  std::size_t line_no = 0;
  std::size_t expected = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    const json rec = parse_json(line, where);
    if (line_no == 1) {
      check_keys(rec, {"format", "version", "seed", "rules", "window", "time", "segment_count"}, where);
      if (as_string(require(rec, "format", where), where + ".format") != kDumpFormat) {
        fail(where + ".format", "not a geometry dump");
      }
      dump.seed = as_seed(require(rec, "seed", where), where + ".seed");
      dump.rules_json =
          rules_to_json(parse_rules(require(rec, "rules", where).dump(), where + ".rules"));
      dump.window = points_from(require(rec, "window", where), where + ".window");
      dump.time = as_number(require(rec, "time", where), where + ".time");
      expected = require(rec, "segment_count", where).get<std::size_t>();
      continue;
    }
    check_keys(rec, {"px", "py", "qx", "qy", "birth_time"}, where);
    TimedSegment s;
    s.segment.p = {as_number(require(rec, "px", where), where + ".px"),
                   as_number(require(rec, "py", where), where + ".py")};
    s.segment.q = {as_number(require(rec, "qx", where), where + ".qx"),
                   as_number(require(rec, "qy", where), where + ".qy")};
    s.birth_time = as_number(require(rec, "birth_time", where), where + ".birth_time");
    dump.segments.push_back(s);
  }
  if (line_no == 0) fail("line 1", "empty geometry dump");
  if (dump.segments.size() != expected) {
    fail("segment_count", "header announces " + std::to_string(expected) + " segments, found " +
                              std::to_string(dump.segments.size()));
  }
  return dump;
}

// ---------------------------------------------------------------------------
// Consistency report

std::string report_to_json(const ConsistencyReport& report) {
  ordered_json out;
  out["format"] = kReportFormat;
  out["version"] = kFormatVersion;
  out["selection"] = report.selection;
  out["division"] = report.division;
  out["stit"] = report.stit;
  out["subwindow"] = points_json(report.subwindow);
  out["window"] = points_json(report.window);
  out["times"] = report.times;
  out["n_reps"] = report.n_reps;
  out["aborted_subwindow"] = report.aborted_v;
  out["aborted_window"] = report.aborted_w;
  out["seed"] = report.seed;
  out["alpha"] = report.alpha;
  out["verdict"] = to_string(report.verdict);
  out["min_adjusted_p"] = report.min_adjusted_p;
  ordered_json results = ordered_json::array();
  for (const StatisticResult& r : report.results) {
    ordered_json row;
    row["statistic"] = r.statistic;
    row["time"] = r.time;
    row["test"] = r.test;
    row["test_statistic"] = r.test_statistic;
    row["effect_size"] = r.effect_size;
    row["mean_subwindow"] = r.mean_v;
    row["mean_window"] = r.mean_w;
    row["p_value"] = r.p_value;
    row["adjusted_p"] = r.adjusted_p;
    results.push_back(row);
  }
  out["results"] = results;
  return out.dump(2) + "\n";
}

ConsistencyReport report_from_json(std::string_view text) {
  const std::string path = "report";
  const json in = parse_json(text, path);
  check_keys(in, {"format", "version", "selection", "division", "stit", "subwindow", "window",
                  "times", "n_reps", "aborted_subwindow", "aborted_window", "seed", "alpha",
                  "verdict", "min_adjusted_p", "results"},
             path);
  if (as_string(require(in, "format", path), path + ".format") != kReportFormat) {
    fail(path + ".format", "not a consistency report");
  }
  ConsistencyReport r;
  r.selection = as_string(require(in, "selection", path), path + ".selection");
  r.division = as_string(require(in, "division", path), path + ".division");
  r.stit = require(in, "stit", path).get<bool>();
  r.subwindow = points_from(require(in, "subwindow", path), path + ".subwindow");
  r.window = points_from(require(in, "window", path), path + ".window");
  r.times = require(in, "times", path).get<std::vector<double>>();
  r.n_reps = require(in, "n_reps", path).get<std::size_t>();
  r.aborted_v = require(in, "aborted_subwindow", path).get<std::size_t>();
  r.aborted_w = require(in, "aborted_window", path).get<std::size_t>();
  r.seed = as_seed(require(in, "seed", path), path + ".seed");
  r.alpha = as_number(require(in, "alpha", path), path + ".alpha");
  r.verdict = verdict_from_string(as_string(require(in, "verdict", path), path + ".verdict"));
  r.min_adjusted_p = as_number(require(in, "min_adjusted_p", path), path + ".min_adjusted_p");
  for (const json& row : require(in, "results", path)) {
    StatisticResult s;
    s.statistic = row.at("statistic").get<std::string>();
    s.time = row.at("time").get<double>();
    s.test = row.at("test").get<std::string>();
    s.test_statistic = row.at("test_statistic").get<double>();
    s.effect_size = row.at("effect_size").get<double>();
    s.mean_v = row.at("mean_subwindow").get<double>();
    s.mean_w = row.at("mean_window").get<double>();
    s.p_value = row.at("p_value").get<double>();
    s.adjusted_p = row.at("adjusted_p").get<double>();
    r.results.push_back(std::move(s));
  }
  return r;
}

std::string report_to_table(const ConsistencyReport& report) {
  std::ostringstream out;
  out << "selection: " << report.selection << "\n"
      << "division:  " << report.division << (report.stit ? "  [STIT pair]" : "") << "\n"
      << "replicates per window: " << report.n_reps << " (aborted: " << report.aborted_v << " / "
      << report.aborted_w << ")\n\n";
  out << std::left << std::setw(20) << "statistic" << std::right << std::setw(8) << "time"
      << std::setw(7) << "test" << std::setw(12) << "effect" << std::setw(12) << "mean V"
      << std::setw(12) << "mean W∩V" << std::setw(12) << "p" << std::setw(12) << "Holm p" << "\n";
  for (const StatisticResult& r : report.results) {
    out << std::left << std::setw(20) << r.statistic << std::right << std::setw(8)
        << std::setprecision(4) << r.time << std::setw(7) << r.test << std::setw(12)
        << std::setprecision(4) << r.effect_size << std::setw(12) << r.mean_v << std::setw(12)
        << r.mean_w << std::setw(12) << std::setprecision(3) << r.p_value << std::setw(12)
        << r.adjusted_p << "\n";
  }
  out << "\nmin Holm-adjusted p = " << std::setprecision(4) << report.min_adjusted_p
      << ", alpha = " << report.alpha << "\nverdict: " << to_string(report.verdict) << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Identity and rate reports

std::string identities_to_json(const std::string& rules_json,
                               std::span<const IdentityCheck> checks) {
  ordered_json out;
  out["format"] = kIdentityFormat;
  out["version"] = kFormatVersion;
  out["rules"] = ordered_json::parse(rules_json);
  bool all = true;
  ordered_json rows = ordered_json::array();
  for (const IdentityCheck& c : checks) {
    ordered_json row;
    row["identity"] = to_string(c.identity);
    row["cases"] = c.cases;
    row["residual"] = c.residual;
    row["tolerance"] = c.tolerance;
    row["passed"] = c.passed;
    rows.push_back(row);
    all = all && c.passed;
  }
  out["all_passed"] = all;
  out["checks"] = rows;
  return out.dump(2) + "\n";
}

std::vector<IdentityCheck> identities_from_json(std::string_view text) {
  const json in = parse_json(text, "identities");
  if (in.value("format", "") != kIdentityFormat) fail("identities.format", "not an identity report");
  std::vector<IdentityCheck> out;
  for (const json& row : in.at("checks")) {
    IdentityCheck c;
    c.identity = identity_from_string(row.at("identity").get<std::string>());
    c.cases = row.at("cases").get<std::size_t>();
    c.residual = row.at("residual").get<double>();
    c.tolerance = row.at("tolerance").get<double>();
    c.passed = row.at("passed").get<bool>();
    out.push_back(c);
  }
  return out;
}

std::string rate_to_json(const std::string& rules_json, const std::vector<RateEstimate>& estimates,
                         double target) {
  ordered_json out;
  out["format"] = kRateFormat;
  out["version"] = kFormatVersion;
  out["rules"] = ordered_json::parse(rules_json);
  out["analytic_rate"] = target;
  ordered_json rows = ordered_json::array();
  for (const RateEstimate& e : estimates) {
    ordered_json row;
    row["dt"] = e.dt;
    row["n_reps"] = e.n_reps;
    row["hits"] = e.hits;
    row["rate"] = e.rate;
    row["std_error"] = e.std_error;
    rows.push_back(row);
  }
  out["estimates"] = rows;
  return out.dump(2) + "\n";
}

std::vector<RateEstimate> rates_from_json(std::string_view text) {
  const json in = parse_json(text, "rate");
  if (in.value("format", "") != kRateFormat) fail("rate.format", "not a rate report");
  std::vector<RateEstimate> out;
  for (const json& row : in.at("estimates")) {
    RateEstimate e;
    e.dt = row.at("dt").get<double>();
    e.n_reps = row.at("n_reps").get<std::size_t>();
    e.hits = row.at("hits").get<std::size_t>();
    e.rate = row.at("rate").get<double>();
    e.std_error = row.at("std_error").get<double>();
    out.push_back(e);
  }
  return out;
}

}  // namespace celldiv
