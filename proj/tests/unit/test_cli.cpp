#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bistatic/constants.hpp"
#include "bistatic_cli/commands.hpp"
#include "bistatic_cli/config.hpp"
#include "bistatic_cli/validate.hpp"

using namespace bistatic;
using namespace bistatic::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("bistatic_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

}  // namespace

TEST(Config, DefaultsMatchReferenceScenario) {
  const RunConfig c = parse_config_text("{}");
  const Scenario s = to_scenario(c.scenario);
  const Scenario ref = default_scenario();
  EXPECT_EQ(s.tx_position, ref.tx_position);
  EXPECT_EQ(s.rx_position, ref.rx_position);
  EXPECT_DOUBLE_EQ(s.omega_carrier, kTwoPi * 3.8e9);
  EXPECT_EQ(s.tx_array.size(), 15);
  EXPECT_EQ(s.rx_array.size(), 3);
  EXPECT_EQ(s.tx_array.element_positions, ref.tx_array.element_positions);
  EXPECT_EQ(s.rx_array.element_positions, ref.rx_array.element_positions);
  EXPECT_EQ(s.subcarrier_offsets, ref.subcarrier_offsets);
  EXPECT_DOUBLE_EQ(s.subcarrier_offsets.back(), kTwoPi * 2.4e6);
  EXPECT_DOUBLE_EQ(s.noise_variance, 2.4e-14);
  EXPECT_DOUBLE_EQ(s.power_budget, 10e-3);
  EXPECT_DOUBLE_EQ(s.gain.rcs_coefficient, 0.1);
  EXPECT_TRUE(s.narrowband);
  const GridSpec g = to_grid(c.grid);
  EXPECT_EQ(g.nx, 41);
  EXPECT_DOUBLE_EQ(g.x_min, -40.0);
  EXPECT_DOUBLE_EQ(g.y_max, 40.0);
  EXPECT_EQ(to_grid(c.grid, true).nx, c.grid.full_res_nx);
}

TEST(Config, RoundTrip) {
  RunConfig c;
  c.scenario.subcarrier_offsets_hz = std::vector<double>{-3.1e6, -1.0 / 3.0, 2.4e6, 7.7e6};
  c.scenario.element_spacing_m = 0.0123456789;
  c.scenario.channel_gain_magnitude = 1.0 / 7.0;
  c.scenario.tx_position_m = {-0.1, 1e-7};
  c.scenario.narrowband = false;
  c.grid.nx = 17;
  c.solver.grad_tol = 3.3e-9;
  c.solver.threads = 4;
  c.output.formats = {"csv"};
  const RunConfig once = parse_config_text(dump_config(c));
  EXPECT_EQ(once, c);
  EXPECT_EQ(parse_config_text(dump_config(once)), once);
  EXPECT_EQ(parse_config_text(dump_config(RunConfig{})), RunConfig{});
}

TEST(Config, RejectsUnknownKeys) {
  EXPECT_THROW(parse_config_text(R"({"scenario": {"carrier_ghz": 3.8}})"), ConfigError);
  EXPECT_THROW(parse_config_text(R"({"extra": 1})"), ConfigError);
  EXPECT_THROW(parse_config_text(R"({"grid": {"nx": 5, "nz": 5}})"), ConfigError);
  EXPECT_THROW(parse_config_text(R"({"solver": {"tolerance": 1e-3}})"), ConfigError);
  EXPECT_THROW(parse_config_text(R"({"output": {"dir": "x"}})"), ConfigError);
}

TEST(Config, RejectsBadValues) {
  EXPECT_THROW(parse_config_text("not json"), ConfigError);
  EXPECT_THROW(parse_config_text(R"({"scenario": {"tx_elements": 2.5}})"), ConfigError);
  EXPECT_THROW(parse_config_text(R"({"scenario": {"tx_elements": 0}})"), ConfigError);
  EXPECT_THROW(parse_config_text(R"({"scenario": {"narrowband": 1}})"), ConfigError);
  EXPECT_THROW(parse_config_text(R"({"scenario": {"tx_position_m": [1]}})"), ConfigError);
  EXPECT_THROW(parse_config_text(R"({"scenario": {"noise_variance_watts": -1}})"), ConfigError);
  EXPECT_THROW(parse_config_text(R"({"scenario": {"subcarrier_offsets_hz": [2, 1]}})"), ConfigError);
  EXPECT_THROW(parse_config_text(R"({"grid": {"x_min_m": 5, "x_max_m": 1}})"), ConfigError);
  EXPECT_THROW(parse_config_text(R"({"solver": {"armijo_shrink": 1.5}})"), ConfigError);
  EXPECT_THROW(parse_config_text(R"({"output": {"formats": ["png"]}})"), ConfigError);
  EXPECT_THROW(parse_config_text(R"({"schema_version": 99})"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, ExplicitOffsets) {
  const RunConfig c = parse_config_text(R"({"scenario": {"subcarrier_offsets_hz": [-1e6, 0, 2e6]}})");
  const Scenario s = to_scenario(c.scenario);
  ASSERT_EQ(s.subcarrier_offsets.size(), 3u);
  EXPECT_DOUBLE_EQ(s.subcarrier_offsets[2], kTwoPi * 2e6);
  EXPECT_FALSE(offsets_symmetric(s.subcarrier_offsets));
}

TEST(Cli, ParseTarget) {
  const Position2D p = parse_target("3.5,-2");
  EXPECT_DOUBLE_EQ(p.x, 3.5);
  EXPECT_DOUBLE_EQ(p.y, -2.0);
  EXPECT_THROW(parse_target("3.5"), ConfigError);
  EXPECT_THROW(parse_target("a,b"), ConfigError);
  EXPECT_THROW(parse_target("1,2,3"), ConfigError);
}

TEST(Cli, OutputDirectoryPrecedence) {
  RunConfig c;
  c.output.directory = "from_config";
  ::unsetenv(kOutDirEnv);
  EXPECT_EQ(resolve_output_dir(c, std::nullopt), "from_config");
  ::setenv(kOutDirEnv, "from_env", 1);
  EXPECT_EQ(resolve_output_dir(c, std::nullopt), "from_env");
  EXPECT_EQ(resolve_output_dir(c, std::string("from_flag")), "from_flag");
  ::unsetenv(kOutDirEnv);
}

TEST(Cli, OptimizePointReportAndArtifact) {
  const fs::path dir = scratch_dir("point");
  std::ostringstream out, err;
  const int rc = cmd_optimize_point(RunConfig{}, "0,10", dir.string(), out, err);
  EXPECT_EQ(rc, kExitOk) << err.str();
  for (const char* field : {"peb", "power share", "rank profile", "max |Re b21|", "iterations", "converged       true"}) {
    EXPECT_NE(out.str().find(field), std::string::npos) << field;
  }
  const nlohmann::json j = read_json(dir / "optimize_point.json");
  EXPECT_EQ(j["schema_version"], kSchemaVersion);
  const PointReport direct = optimize_point(RunConfig{}, {0.0, 10.0});
  EXPECT_EQ(j["peb_m"].get<double>(), direct.peb);
  EXPECT_GT(direct.peb, 0.0);
  EXPECT_TRUE(j["converged"].get<bool>());
  ASSERT_EQ(j["beam_covariance"].size(), 2u);
  EXPECT_EQ(j["beam_covariance"][0]["real"][0][0].get<double>(), direct.result.B_opt[0](0, 0).real());
  EXPECT_EQ(j["beam_covariance"][1]["imag"][1][0].get<double>(), direct.result.B_opt[1](1, 0).imag());
  fs::remove_all(dir);
}

TEST(Cli, ExitCodes) {
  std::ostringstream out, err;
  EXPECT_EQ(cmd_optimize_point(RunConfig{}, "-10,0", std::nullopt, out, err), kExitInfeasible);
  EXPECT_NE(err.str().find("degenerate"), std::string::npos);

  RunConfig p1;
  p1.scenario.subcarriers = 1;
  p1.scenario.rx_elements = 1;
  err.str("");
  EXPECT_EQ(cmd_optimize_point(p1, "0,10", std::nullopt, out, err), kExitInfeasible);
  EXPECT_NE(err.str().find("unidentifiable"), std::string::npos);

  EXPECT_EQ(cmd_optimize_point(RunConfig{}, "oops", std::nullopt, out, err), kExitConfig);

  RunConfig starved;
  starved.solver.max_iters = 1;
  starved.output.formats = {};
  EXPECT_EQ(cmd_optimize_point(starved, "3,12", std::nullopt, out, err), kExitNonConvergence);

  EXPECT_EQ(cmd_map(RunConfig{}, "heat", std::nullopt, false, out, err), kExitConfig);
}

TEST(Cli, MapWritesCsvAndSidecar) {
  const fs::path dir = scratch_dir("map");
  RunConfig c;
  c.grid.nx = c.grid.ny = 21;
  std::ostringstream out, err;
  for (const char* kind : {"peb", "power", "role"}) {
    EXPECT_EQ(cmd_map(c, kind, dir.string(), false, out, err), kExitOk) << kind << err.str();
    EXPECT_TRUE(fs::exists(dir / (std::string(kind) + "_map.csv")));
    const nlohmann::json meta = read_json(dir / (std::string(kind) + "_map.json"));
    EXPECT_EQ(meta["schema_version"], kSchemaVersion);
    EXPECT_EQ(meta["cells"], 441);
    EXPECT_GE(meta["finite_cells"].get<int>(), 0.95 * 441);
    EXPECT_TRUE(meta.contains("timestamp_utc"));
    EXPECT_EQ(parse_config(meta["config"]), c);
    EXPECT_TRUE(meta["versions"].contains("bistatic"));
  }
  fs::remove_all(dir);
}

TEST(Cli, MapAcceptanceThreshold) {
  MapResult m;
  m.cells.resize(10);
  for (int i = 0; i < 9; ++i) m.cells[i].peb = 1.0;
  m.cells[9].status = CellStatus::SingularEfim;
  m.cells[9].peb = std::nan("");
  EXPECT_TRUE(map_acceptable(m));
  m.cells[8].status = CellStatus::NonConvergence;
  m.cells[8].peb = std::nan("");
  EXPECT_FALSE(map_acceptable(m));
}

TEST(Validate, DefaultConfigPasses) {
  std::ostringstream out, err;
  EXPECT_EQ(cmd_validate(RunConfig{}, out, err), kExitOk) << out.str() << err.str();
  EXPECT_NE(out.str().find("all checks passed"), std::string::npos);
  for (const char* check : {"fim-dual-path", "gradient", "convexity", "real-correlation-zero", "outermost-support",
                            "known-gain-identity"}) {
    EXPECT_NE(out.str().find(std::string("[PASS] ") + check), std::string::npos) << check;
  }
}

TEST(Validate, AsymmetricOffsetsDeclaredSymmetricFail) {
  RunConfig c;
  c.scenario.subcarrier_offsets_hz = std::vector<double>{-2.4e6, 4.8e6};
  c.scenario.symmetric_subcarriers = true;
  std::ostringstream out, err;
  EXPECT_EQ(cmd_validate(c, out, err), kExitValidation);
  EXPECT_NE(out.str().find("[FAIL] subcarrier-symmetry"), std::string::npos);
  EXPECT_NE(out.str().find("SYMMETRY VIOLATED"), std::string::npos);

  c.scenario.symmetric_subcarriers = false;
  out.str("");
  EXPECT_EQ(cmd_validate(c, out, err), kExitOk) << out.str();
}

TEST(Validate, WidebandUsesTrendCheck) {
  RunConfig c;
  c.scenario.narrowband = false;
  c.scenario.subcarriers = 4;
  const ValidationReport r = run_validation(to_scenario(c.scenario), to_grid(c.grid), to_options(c.solver));
  EXPECT_TRUE(r.passed());
  bool trend = false, support = false;
  for (const auto& chk : r.checks) {
    trend |= chk.name == "higher-subcarrier-trend" && chk.passed && !chk.skipped;
    support |= chk.name == "outermost-support";
  }
  EXPECT_TRUE(trend);
  EXPECT_FALSE(support);
}
