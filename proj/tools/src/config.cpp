#include "config.hpp"

#include <fstream>
#include <sstream>

#include "celldiv/errors.hpp"
#include "celldiv/io.hpp"
#include "json.hpp"

namespace celldiv::cli {
namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError(path + ": " + message);
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

const json* optional_field(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double as_positive(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!(x > 0.0) || !std::isfinite(x)) fail(path, "expected a positive finite number");
  return x;
}

std::uint64_t as_count(const json& v, const std::string& path) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    fail(path, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::vector<double> positive_list(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) fail(path, "expected a non-empty list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(as_positive(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Polygon polygon_at(const json& v, const std::string& path) { return parse_polygon(v.dump(), path); }

Point point_at(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    fail(path, "expected [x, y]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

Probe probe_at(const json& v, const std::string& path) {
  if (v.is_object()) {
    check_keys(v, {"segment"}, path);
    const json& s = require(v, "segment", path);
    if (!s.is_array() || s.size() != 2) fail(path + ".segment", "expected [[x, y], [x, y]]");
    const Segment seg{point_at(s[0], path + ".segment[0]"), point_at(s[1], path + ".segment[1]")};
    if (seg.p == seg.q) fail(path + ".segment", "degenerate segment");
    return seg;
  }
  return polygon_at(v, path);
}

std::string position_of(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, std::optional<std::uint64_t> seed_override) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is one past the offending character
    throw ConfigError("config: " + position_of(text, e.byte == 0 ? 0 : e.byte - 1) +
                      ": malformed JSON");
  }
  const std::string p = "config";
  check_keys(root, {"schema_version", "seed", "rules", "window", "subwindow", "simulate",
                    "consistency", "verify", "rate", "out_dir"},
             p);

  ExperimentConfig cfg;
  cfg.schema_version = static_cast<int>(as_count(require(root, "schema_version", p), p + ".schema_version"));
  if (cfg.schema_version != kSchemaVersion) {
    fail(p + ".schema_version", "unsupported version " + std::to_string(cfg.schema_version) +
                                    " (expected " + std::to_string(kSchemaVersion) + ")");
  }
  if (seed_override) {
    cfg.seed = *seed_override;
  } else if (const json* s = optional_field(root, "seed")) {
    cfg.seed = as_count(*s, p + ".seed");
  } else {
    fail(p + ".seed", "missing required field (or pass --seed)");
  }
  if (seed_override && root.contains("seed")) as_count(root["seed"], p + ".seed");

  cfg.rules = parse_rules(require(root, "rules", p).dump(), p + ".rules");
  cfg.rules_json = rules_to_json(cfg.rules);

  if (const json* w = optional_field(root, "window")) cfg.window = polygon_at(*w, p + ".window");
  if (const json* v = optional_field(root, "subwindow")) {
    cfg.subwindow = polygon_at(*v, p + ".subwindow");
  }
  if (cfg.window && cfg.subwindow && !cfg.window->contains(*cfg.subwindow)) {
    fail(p + ".subwindow", "subwindow is not contained in the window");
  }
  if (const json* o = optional_field(root, "out_dir")) {
    if (!o->is_string()) fail(p + ".out_dir", "expected a string");
    cfg.out_dir = o->get<std::string>();
  }

  if (const json* s = optional_field(root, "simulate")) {
    const std::string sp = p + ".simulate";
    check_keys(*s, {"time"}, sp);
    cfg.simulate = SimulateBlock{as_positive(require(*s, "time", sp), sp + ".time")};
  }

  if (const json* c = optional_field(root, "consistency")) {
    const std::string cp = p + ".consistency";
    check_keys(*c, {"times", "n_reps", "alpha", "probes"}, cp);
    ConsistencyBlock block;
    block.times = positive_list(require(*c, "times", cp), cp + ".times");
    for (std::size_t i = 1; i < block.times.size(); ++i) {
      if (!(block.times[i] > block.times[i - 1])) fail(cp + ".times", "times must be ascending");
    }
    if (const json* n = optional_field(*c, "n_reps")) block.n_reps = as_count(*n, cp + ".n_reps");
    if (block.n_reps < kMinConsistencyReps) {
      fail(cp + ".n_reps", "at least " + std::to_string(kMinConsistencyReps) + " replicates required");
    }
    if (const json* a = optional_field(*c, "alpha")) {
      block.alpha = as_positive(*a, cp + ".alpha");
      if (block.alpha >= 1.0) fail(cp + ".alpha", "alpha must lie in (0, 1)");
    }
    if (const json* pr = optional_field(*c, "probes")) {
      if (!pr->is_array()) fail(cp + ".probes", "expected a list of probes");
      std::vector<Probe> probes;
      for (std::size_t i = 0; i < pr->size(); ++i) {
        probes.push_back(probe_at((*pr)[i], cp + ".probes[" + std::to_string(i) + "]"));
      }
      block.probes = std::move(probes);
    }
    cfg.consistency = std::move(block);
  }

  if (const json* v = optional_field(root, "verify")) {
    const std::string vp = p + ".verify";
    check_keys(*v, {"identities", "n_configs"}, vp);
    VerifyBlock block;
    if (const json* ids = optional_field(*v, "identities")) {
      if (!ids->is_array()) fail(vp + ".identities", "expected a list of identity names");
      block.identities.clear();
      for (std::size_t i = 0; i < ids->size(); ++i) {
        const std::string ip = vp + ".identities[" + std::to_string(i) + "]";
        if (!(*ids)[i].is_string()) fail(ip, "expected a string");
        try {
          block.identities.push_back(identity_from_string((*ids)[i].get<std::string>()));
        } catch (const std::invalid_argument& e) {
          fail(ip, e.what());
        }
      }
    }
    if (const json* n = optional_field(*v, "n_configs")) {
      block.n_configs = as_count(*n, vp + ".n_configs");
      if (block.n_configs == 0) fail(vp + ".n_configs", "must be positive");
    }
    cfg.verify = std::move(block);
  }

  if (const json* r = optional_field(root, "rate")) {
    const std::string rp = p + ".rate";
    check_keys(*r, {"probe", "dt", "n_reps"}, rp);
    RateBlock block{polygon_at(require(*r, "probe", rp), rp + ".probe"),
                    positive_list(require(*r, "dt", rp), rp + ".dt")};
    if (const json* n = optional_field(*r, "n_reps")) {
      block.n_reps = as_count(*n, rp + ".n_reps");
      if (block.n_reps == 0) fail(rp + ".n_reps", "must be positive");
    }
    if (cfg.window && !cfg.window->contains(block.probe)) {
      fail(rp + ".probe", "probe is not contained in the window");
    }
    cfg.rate = std::move(block);
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config(text.str(), seed_override);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace celldiv::cli
