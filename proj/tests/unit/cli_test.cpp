#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "celldiv/analysis.hpp"
#include "celldiv/io.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "svg.hpp"

namespace celldiv {
namespace {

namespace fs = std::filesystem;

constexpr const char* kStitRules = R"("rules": {
    "measures": {"lambda": {"intensity": 1.0, "directions": "isotropic"}},
    "selection": {"kind": "hitting_measure", "measure": "lambda"},
    "division": {"kind": "restricted_measure", "measure": "lambda"}
  })";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string simulate_config(double time, int seed = 42) {
  return "{\n  \"schema_version\": 1,\n  \"seed\": " + std::to_string(seed) + ",\n  " + kStitRules +
         ",\n  \"window\": [[0, 0], [2, 0], [2, 1], [0, 1]],\n  \"simulate\": {\"time\": " +
         format_double(time) + "}\n}\n";
}

std::string consistency_config(const std::string& division, std::size_t n_reps, double alpha,
                               const std::string& window = "[[0, 0], [3, 0], [3, 3], [0, 3]]") {
  return R"({
  "schema_version": 1,
  "seed": 5,
  "rules": {
    "measures": {"lambda": {"intensity": 1.0, "directions": "isotropic"}},
    "selection": {"kind": "hitting_measure", "measure": "lambda"},
    "division": )" +
         division + R"(
  },
  "window": )" + window +
         R"(,
  "subwindow": [[0, 0], [1, 0], [1, 1], [0, 1]],
  "consistency": {"times": [0.75, 1.5], "n_reps": )" +
         std::to_string(n_reps) + ", \"alpha\": " + format_double(alpha) + "}\n}\n";
}

std::string verify_config(const std::string& selection, const std::string& identities) {
  return R"({
  "schema_version": 1,
  "seed": 9,
  "rules": {
    "measures": {"lambda": {"intensity": 1.0, "directions": "isotropic"}},
    "selection": )" +
         selection + R"(,
    "division": {"kind": "restricted_measure", "measure": "lambda"}
  },
  "verify": {"identities": )" +
         identities + R"(, "n_configs": 50}
})";
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("celldiv_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const std::string& name, const std::string& body) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << body;
    return p;
  }

  int run(const std::vector<std::string>& args) {
    out_.str("");
    err_.str("");
    return cli::run_cli(args, out_, err_);
  }

  int run_with(const std::string& command, const std::string& body, const std::string& sub = "") {
    const fs::path cfg = write_config(command + sub + ".json", body);
    return run({command, "--config", cfg.string(), "--out", (dir_ / (command + sub)).string()});
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

// --- simulate ----------------------------------------------------------------

TEST_F(CliTest, SimulateIsDeterministicPerSeed) {
  const fs::path cfg = write_config("sim.json", simulate_config(4.0));
  ASSERT_EQ(run({"simulate", "--config", cfg.string(), "--out", (dir_ / "a").string()}), 0) << err_.str();
  EXPECT_NE(out_.str().find("divisions"), std::string::npos);
  ASSERT_EQ(run({"simulate", "--config", cfg.string(), "--out", (dir_ / "b").string()}), 0);
  ASSERT_EQ(run({"simulate", "--config", cfg.string(), "--out", (dir_ / "c").string(), "--seed", "43"}), 0);

  const std::string a = slurp(dir_ / "a" / "geometry.jsonl");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir_ / "b" / "geometry.jsonl"));
  EXPECT_EQ(slurp(dir_ / "a" / "tessellation.svg"), slurp(dir_ / "b" / "tessellation.svg"));
  EXPECT_NE(a, slurp(dir_ / "c" / "geometry.jsonl"));
  EXPECT_EQ(read_geometry_dump(slurp(dir_ / "c" / "geometry.jsonl")).seed, 43u);
}

TEST_F(CliTest, SeedOverrideMatchesSeedInConfig) {
  const fs::path with = write_config("with.json", simulate_config(4.0, 7));
  const fs::path other = write_config("other.json", simulate_config(4.0, 99));
  ASSERT_EQ(run({"simulate", "--config", with.string(), "--out", (dir_ / "a").string()}), 0);
  ASSERT_EQ(run({"simulate", "--config", other.string(), "--seed", "7", "--out", (dir_ / "b").string()}), 0);
  EXPECT_EQ(slurp(dir_ / "a" / "geometry.jsonl"), slurp(dir_ / "b" / "geometry.jsonl"));
}

TEST_F(CliTest, TinyTimeGivesNoSegments) {
  // P(no division before t) = exp(-t 6/pi), about 0.99998 here
  ASSERT_EQ(run_with("simulate", simulate_config(1e-5)), 0) << err_.str();
  const GeometryDump dump = read_geometry_dump(slurp(dir_ / "simulate" / "geometry.jsonl"));
  EXPECT_TRUE(dump.segments.empty());
  EXPECT_TRUE(cli::parse_svg(slurp(dir_ / "simulate" / "tessellation.svg")).segments.empty());
}

TEST_F(CliTest, DumpAndSvgAgree) {
  ASSERT_EQ(run_with("simulate", simulate_config(6.0)), 0) << err_.str();
  const std::string text = slurp(dir_ / "simulate" / "geometry.jsonl");
  const GeometryDump dump = read_geometry_dump(text);
  EXPECT_EQ(write_geometry_dump(dump), text);
  EXPECT_EQ(dump.seed, 42u);
  EXPECT_EQ(dump.time, 6.0);
  ASSERT_FALSE(dump.segments.empty());

  const cli::SvgScene scene = cli::parse_svg(slurp(dir_ / "simulate" / "tessellation.svg"));
  EXPECT_EQ(scene.time, dump.time);
  EXPECT_EQ(scene.window, dump.window);
  ASSERT_EQ(scene.segments.size(), dump.segments.size());
  for (std::size_t i = 0; i < dump.segments.size(); ++i) {
    EXPECT_EQ(scene.segments[i].segment, dump.segments[i].segment);
    EXPECT_EQ(scene.segments[i].birth_time, dump.segments[i].birth_time);
  }
}

TEST_F(CliTest, SimulateNeedsWindowAndTime) {
  EXPECT_EQ(run_with("simulate", std::string("{\"schema_version\": 1, \"seed\": 1, ") + kStitRules + "}"), 1);
  EXPECT_NE(err_.str().find("config.window: required by 'simulate'"), std::string::npos) << err_.str();
}

// --- consistency -------------------------------------------------------------

TEST_F(CliTest, ConsistencyAcceptsStit) {
  ASSERT_EQ(run_with("consistency",
                     consistency_config(R"({"kind": "restricted_measure", "measure": "lambda"})", 2000, 0.01)),
            0)
      << err_.str();
  EXPECT_NE(out_.str().find("consistent-not-rejected"), std::string::npos) << out_.str();
  const ConsistencyReport report = report_from_json(slurp(dir_ / "consistency" / "consistency_report.json"));
  EXPECT_EQ(report.verdict, Verdict::ConsistentNotRejected);
  EXPECT_EQ(report.n_reps, 2000u);
  EXPECT_EQ(slurp(dir_ / "consistency" / "consistency_report.txt"), out_.str());
}

TEST_F(CliTest, ConsistencyRejectsPointDrivenDivision) {
  ASSERT_EQ(run_with("consistency",
                     consistency_config(R"({"kind": "point_driven", "directions": "isotropic"})", 10000, 0.001)),
            2)
      << err_.str();
  EXPECT_NE(out_.str().find("inconsistent-detected"), std::string::npos) << out_.str();
}

TEST_F(CliTest, ConsistencyRejectsMalformedWindow) {
  EXPECT_EQ(run_with("consistency",
                     consistency_config(R"({"kind": "restricted_measure", "measure": "lambda"})", 2000, 0.01,
                                        "[[0, 0], [3, 3], [3, 0], [0, 3]]")),
            1);
  EXPECT_NE(err_.str().find("config.window"), std::string::npos) << err_.str();
}

TEST_F(CliTest, ConsistencyRejectsSubwindowOutsideWindow) {
  EXPECT_EQ(run_with("consistency",
                     consistency_config(R"({"kind": "restricted_measure", "measure": "lambda"})", 2000, 0.01,
                                        "[[0.5, 0], [3, 0], [3, 3], [0.5, 3]]")),
            1);
  EXPECT_NE(err_.str().find("not contained"), std::string::npos) << err_.str();
}

// --- verify --------------------------------------------------------------------

TEST_F(CliTest, VerifyPassesForStit) {
  ASSERT_EQ(run_with("verify", verify_config(R"({"kind": "hitting_measure", "measure": "lambda"})",
                                             R"(["fundamental", "nu_limit", "corollary", "lambda_nu", "rate_bound"])")),
            0)
      << err_.str();
  const auto checks = identities_from_json(slurp(dir_ / "verify" / "verify_report.json"));
  ASSERT_EQ(checks.size(), 5u);
  for (const auto& c : checks) {
    EXPECT_TRUE(c.passed) << to_string(c.identity);
    EXPECT_EQ(c.cases, 50u);
  }
}

TEST_F(CliTest, VerifyFailsLambdaNuForVertexCountSelection) {
  ASSERT_EQ(run_with("verify", verify_config(R"({"kind": "vertex_count"})", R"(["lambda_nu", "rate_bound"])")), 2);
  const auto checks = identities_from_json(slurp(dir_ / "verify" / "verify_report.json"));
  ASSERT_EQ(checks.size(), 2u);
  EXPECT_EQ(checks[0].identity, Identity::LambdaNu);
  EXPECT_FALSE(checks[0].passed);
  EXPECT_TRUE(checks[1].passed);
  EXPECT_NE(out_.str().find("FAIL"), std::string::npos);
}

TEST_F(CliTest, VerifyRejectsEmptyIdentityList) {
  EXPECT_EQ(run_with("verify", verify_config(R"({"kind": "hitting_measure", "measure": "lambda"})", "[]")), 1);
  EXPECT_NE(err_.str().find("empty identity list"), std::string::npos) << err_.str();
}

TEST_F(CliTest, VerifyRejectsUnknownIdentity) {
  EXPECT_EQ(run_with("verify", verify_config(R"({"kind": "hitting_measure", "measure": "lambda"})", R"(["nope"])")), 1);
  EXPECT_NE(err_.str().find("config.verify.identities[0]"), std::string::npos) << err_.str();
}

// --- rate ------------------------------------------------------------------------

TEST_F(CliTest, RateReportMatchesLibrary) {
  const std::string body = std::string("{\"schema_version\": 1, \"seed\": 3, ") + kStitRules + R"(,
  "window": [[0, 0], [1, 0], [1, 1], [0, 1]],
  "rate": {"probe": [[0.25, 0.25], [0.75, 0.25], [0.75, 0.75], [0.25, 0.75]], "dt": [0.02, 0.01], "n_reps": 4000}
})";
  ASSERT_EQ(run_with("rate", body), 0) << err_.str();
  const auto estimates = rates_from_json(slurp(dir_ / "rate" / "rate_report.json"));
  ASSERT_EQ(estimates.size(), 2u);
  const cli::ExperimentConfig cfg = cli::parse_config(body);
  const Polygon B = Polygon::centered_square(0.5, {0.5, 0.5});
  for (const RateEstimate& e : estimates) {
    const RateEstimate direct = rate_estimate(cfg.rules, *cfg.window, B, e.dt, 4000, 3, 1);
    EXPECT_EQ(e.hits, direct.hits);
    EXPECT_EQ(e.rate, direct.rate);
    EXPECT_EQ(e.std_error, direct.std_error);
  }
  EXPECT_NE(out_.str().find("target"), std::string::npos);
}

// --- config and command-line errors ------------------------------------------------

TEST_F(CliTest, UnknownKeyIsNamed) {
  EXPECT_EQ(run_with("simulate", std::string("{\"schema_version\": 1, \"seed\": 1, \"colour\": 2, ") + kStitRules + "}"),
            1);
  EXPECT_NE(err_.str().find("config.colour: unknown key"), std::string::npos) << err_.str();
}

TEST_F(CliTest, MissingSeedIsReported) {
  const std::string body = std::string("{\"schema_version\": 1, ") + kStitRules +
                           R"(, "window": [[0, 0], [1, 0], [1, 1], [0, 1]], "simulate": {"time": 1}})";
  EXPECT_EQ(run_with("simulate", body), 1);
  EXPECT_NE(err_.str().find("config.seed: missing required field"), std::string::npos) << err_.str();
  // supplying it on the command line is enough
  const fs::path cfg = write_config("noseed.json", body);
  EXPECT_EQ(run({"simulate", "--config", cfg.string(), "--seed", "5", "--out", dir_.string()}), 0) << err_.str();
}

TEST_F(CliTest, SyntaxErrorNamesLine) {
  EXPECT_EQ(run_with("simulate", "{\n  \"schema_version\": 1,\n  \"seed\": 1,,\n}\n"), 1);
  EXPECT_NE(err_.str().find("line 3"), std::string::npos) << err_.str();
  EXPECT_NE(err_.str().find("simulate.json"), std::string::npos) << err_.str();
}

TEST_F(CliTest, UnsupportedSchemaVersion) {
  EXPECT_EQ(run_with("simulate", std::string("{\"schema_version\": 2, \"seed\": 1, ") + kStitRules + "}"), 1);
  EXPECT_NE(err_.str().find("config.schema_version"), std::string::npos) << err_.str();
}

TEST_F(CliTest, MissingConfigFile) {
  EXPECT_EQ(run({"verify", "--config", (dir_ / "absent.json").string()}), 1);
  EXPECT_NE(err_.str().find("cannot open"), std::string::npos) << err_.str();
}

TEST_F(CliTest, CommandLineErrors) {
  EXPECT_EQ(run({}), 1);
  EXPECT_EQ(run({"simulate"}), 1);
  EXPECT_EQ(run({"explode", "--config", "x"}), 1);
  EXPECT_EQ(run({"--help"}), 0);
  EXPECT_NE(out_.str().find("consistency"), std::string::npos);
}

TEST_F(CliTest, ShippedConfigsParse) {
  for (const char* name : {"stit.json", "stit_rate.json", "area.json", "vertex_count.json", "point_driven.json"}) {
    EXPECT_NO_THROW(cli::load_config(fs::path(CELLDIV_CONFIG_DIR) / name)) << name;
  }
}

}  // namespace
}  // namespace celldiv
