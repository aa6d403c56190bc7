#pragma once

// Subcommands of the celldiv executable.

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"

namespace celldiv::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
/// consistency: inconsistency detected; verify: an identity failed.
inline constexpr int kExitNegative = 2;

struct RunOptions {
  unsigned threads = 0;  // 0 = all cores
  std::optional<std::filesystem::path> out_dir;
};

/// Writes geometry.jsonl and tessellation.svg for Y(t, W).
int cmd_simulate(const ExperimentConfig& config, const RunOptions& options, std::ostream& out);
/// Writes consistency_report.json and consistency_report.txt.
int cmd_consistency(const ExperimentConfig& config, const RunOptions& options, std::ostream& out);
/// Writes verify_report.json.
int cmd_verify(const ExperimentConfig& config, const RunOptions& options, std::ostream& out);
/// Writes rate_report.json.
int cmd_rate(const ExperimentConfig& config, const RunOptions& options, std::ostream& out);

/// Full command line handling; returns the process exit code. `args`
/// excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace celldiv::cli
