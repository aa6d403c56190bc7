#pragma once

// Experiment configuration files. See docs/formats.md for the schema.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "celldiv/analysis.hpp"
#include "celldiv/geometry.hpp"
#include "celldiv/rules.hpp"

namespace celldiv::cli {

inline constexpr int kSchemaVersion = 1;

struct SimulateBlock {
  double time = 0.0;
};

struct ConsistencyBlock {
  std::vector<double> times;
  std::size_t n_reps = 2000;
  double alpha = 0.001;
  std::optional<std::vector<Probe>> probes;
};

struct VerifyBlock {
  std::vector<Identity> identities = all_identities();
  std::size_t n_configs = 100;
};

struct RateBlock {
  Polygon probe;
  std::vector<double> dt;
  std::size_t n_reps = 100000;
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  std::uint64_t seed = 0;
  RulePair rules;
  /// Canonical form of `rules`, as written into every output.
  std::string rules_json;
  std::optional<Polygon> window;
  std::optional<Polygon> subwindow;
  std::optional<SimulateBlock> simulate;
  std::optional<ConsistencyBlock> consistency;
  std::optional<VerifyBlock> verify;
  std::optional<RateBlock> rate;
  std::filesystem::path out_dir = ".";
};

/// Parses and validates a config. `seed_override` replaces (or supplies)
/// the seed. Errors are ConfigError naming the line and column for syntax
/// errors and the field path ("config.window[2]") for schema errors.
ExperimentConfig parse_config(std::string_view text,
                              std::optional<std::uint64_t> seed_override = std::nullopt);

ExperimentConfig load_config(const std::filesystem::path& path,
                             std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace celldiv::cli
