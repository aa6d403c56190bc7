#include "commands.hpp"

#include <cstdio>
#include <fstream>

#include "CLI11.hpp"
#include "celldiv/engine.hpp"
#include "celldiv/errors.hpp"
#include "celldiv/io.hpp"
#include "svg.hpp"

namespace celldiv::cli {
namespace {

std::filesystem::path output_dir(const ExperimentConfig& config, const RunOptions& options) {
  std::filesystem::path dir = options.out_dir.value_or(config.out_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error(path.string() + ": cannot open for writing");
  f << content;
  if (!f) throw std::runtime_error(path.string() + ": write failed");
}

template <class T>
const T& need(const std::optional<T>& value, const char* field, const char* command) {
  if (!value) {
    throw ConfigError(std::string("config.") + field + ": required by '" + command + "'");
  }
  return *value;
}

std::string fixed(double v, const char* fmt = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace

int cmd_simulate(const ExperimentConfig& config, const RunOptions& options, std::ostream& out) {
  const Polygon& window = need(config.window, "window", "simulate");
  const SimulateBlock& block = need(config.simulate, "simulate", "simulate");
  guard_rate_bound(config.rules, window, config.seed);
  ProcessState state = new_process(window, config.rules, config.seed);
  state.advance(block.time);

  GeometryDump dump = make_geometry_dump(state);
  const auto dir = output_dir(config, options);
  write_file(dir / "geometry.jsonl", write_geometry_dump(dump));
  write_file(dir / "tessellation.svg", render_svg({dump.window, dump.time, dump.segments}));
  out << "simulated t=" << format_double(block.time) << ": " << state.events() << " divisions, "
      << state.cell_count() << " cells\n"
      << "wrote " << (dir / "geometry.jsonl").string() << " and "
      << (dir / "tessellation.svg").string() << "\n";
  return kExitOk;
}

int cmd_consistency(const ExperimentConfig& config, const RunOptions& options, std::ostream& out) {
  const Polygon& W = need(config.window, "window", "consistency");
  const Polygon& V = need(config.subwindow, "subwindow", "consistency");
  const ConsistencyBlock& block = need(config.consistency, "consistency", "consistency");
  guard_rate_bound(config.rules, W, config.seed);

  ConsistencyOptions opt;
  opt.times = block.times;
  opt.n_reps = block.n_reps;
  opt.probes = block.probes;
  opt.alpha = block.alpha;
  opt.seed = config.seed;
  opt.threads = options.threads;
  const ConsistencyReport report = consistency_test(config.rules, V, W, opt);

  const auto dir = output_dir(config, options);
  const std::string table = report_to_table(report);
  write_file(dir / "consistency_report.json", report_to_json(report));
  write_file(dir / "consistency_report.txt", table);
  out << table;
  return report.verdict == Verdict::InconsistentDetected ? kExitNegative : kExitOk;
}

int cmd_verify(const ExperimentConfig& config, const RunOptions& options, std::ostream& out) {
  const VerifyBlock block = config.verify.value_or(VerifyBlock{});
  if (block.identities.empty()) {
    throw ConfigError("config.verify.identities: empty identity list, nothing to verify");
  }
  const auto checks = verify_identities(config.rules, block.identities, block.n_configs, config.seed);
  const auto dir = output_dir(config, options);
  write_file(dir / "verify_report.json", identities_to_json(config.rules_json, checks));

  bool all = true;
  out << "identity      cases  worst residual  tolerance  result\n";
  for (const IdentityCheck& c : checks) {
    char line[160];
    std::snprintf(line, sizeof line, "%-12s %6zu  %14.3e  %9.1e  %s\n", to_string(c.identity).c_str(),
                  c.cases, c.residual, c.tolerance, c.passed ? "PASS" : "FAIL");
    out << line;
    all = all && c.passed;
  }
  return all ? kExitOk : kExitNegative;
}

int cmd_rate(const ExperimentConfig& config, const RunOptions& options, std::ostream& out) {
  const Polygon& V = need(config.window, "window", "rate");
  const RateBlock& block = need(config.rate, "rate", "rate");
  const double target =
      rate(config.rules.selection, V) * division_hit_prob(config.rules.division, V, block.probe);

  std::vector<RateEstimate> estimates;
  for (double dt : block.dt) {
    estimates.push_back(rate_estimate(config.rules, V, block.probe, dt, block.n_reps, config.seed,
                                      options.threads));
  }
  const auto dir = output_dir(config, options);
  write_file(dir / "rate_report.json", rate_to_json(config.rules_json, estimates, target));

  out << "target lambda(V) Lambda_V([B]) = " << fixed(target, "%.10g") << "\n"
      << "dt            hits      estimate    std error\n";
  for (const RateEstimate& e : estimates) {
    char line[160];
    std::snprintf(line, sizeof line, "%-10g %8zu  %12.6f  %11.6f\n", e.dt, e.hits, e.rate, e.std_error);
    out << line;
  }
  return kExitOk;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cell-division tessellations: simulation and spatial-consistency experiments",
               "celldiv"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::string out_dir;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Experiment config (JSON)")->required();
    sub->add_option("--seed", seed, "Seed; overrides the config");
    sub->add_option("--threads", threads, "Worker threads (default: all cores)");
    sub->add_option("--out", out_dir, "Output directory; overrides the config");
  };
  CLI::App* simulate = app.add_subcommand("simulate", "Simulate Y(t, W); write dump and SVG");
  CLI::App* consistency = app.add_subcommand("consistency", "Compare Y(t, V) with Y(t, W) in V");
  CLI::App* verify = app.add_subcommand("verify", "Run the analytic identity suite");
  CLI::App* rate_cmd = app.add_subcommand("rate", "Estimate the small-dt hitting rate");
  for (CLI::App* sub : {simulate, consistency, verify, rate_cmd}) add_common(sub);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }

  try {
    const ExperimentConfig config = load_config(config_path, seed);
    RunOptions options{threads, std::nullopt};
    if (!out_dir.empty()) options.out_dir = out_dir;
    if (simulate->parsed()) return cmd_simulate(config, options, out);
    if (consistency->parsed()) return cmd_consistency(config, options, out);
    if (verify->parsed()) return cmd_verify(config, options, out);
    return cmd_rate(config, options, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace celldiv::cli
