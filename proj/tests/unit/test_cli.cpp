// Copyright 2026 The fbtur Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "fbtur/config.hpp"
#include "fbtur/runner.hpp"

#ifndef FBTUR_CLI_PATH
#error "FBTUR_CLI_PATH must point at the fbtur executable"
#endif

namespace fbtur::cli {
namespace {

namespace fs = std::filesystem;

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliRun : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fbtur_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run_cli(const std::string& config, const std::string& extra = "") {
    const fs::path cfg = dir_ / "config.json";
    std::ofstream(cfg) << config;
    const std::string cmd = std::string(FBTUR_CLI_PATH) + " run --config " + cfg.string() + " --out " +
                            (dir_ / "out").string() + " " + extra + " > " + (dir_ / "log.txt").string() +
                            " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  fs::path dir_;
};

TEST(ParseConfig, MinimalUsesDefaults) {
  const RunConfig c = parse_config("{}");
  EXPECT_EQ(c.mode, Mode::single);
  EXPECT_EQ(c.model, ModelKind::clock);
  EXPECT_EQ(c.clock, models::ClockParams{});
  EXPECT_EQ(c.initial_state, InitialState::steady);
  EXPECT_DOUBLE_EQ(c.integrator.h, 1e-3 * c.tau);
}

TEST(ParseConfig, ReadsNestedSections) {
  const RunConfig c = parse_config(R"({
    // sweep of the clock's middle level
    "mode": "sweep", "model": "clock", "E1": 0.5, "tau": 2.0,
    "integrator": {"method": "rk45_adaptive", "rel_tol": 1e-9},
    "sweep": {"param": "E1", "start": -1, "stop": 1, "n_points": 5},
    "output": {"dir": "results", "timeseries": true}
  })");
  EXPECT_EQ(c.mode, Mode::sweep);
  EXPECT_DOUBLE_EQ(c.clock.E1, 0.5);
  EXPECT_DOUBLE_EQ(c.tau, 2.0);
  EXPECT_DOUBLE_EQ(c.integrator.h, 2e-3);
  EXPECT_EQ(c.integrator.method, IntegratorMethod::rk45_adaptive);
  EXPECT_DOUBLE_EQ(c.integrator.rel_tol, 1e-9);
  EXPECT_EQ(c.sweep.n_points, 5);
  EXPECT_EQ(c.output.dir, "results");
  EXPECT_TRUE(c.output.timeseries);
}

TEST(ParseConfig, RejectsSinglePointSweep) {
  EXPECT_THROW(parse_config(R"({"mode": "sweep", "sweep": {"param": "E1", "n_points": 1}})"), ConfigError);
}

TEST(ParseConfig, RejectsUnknownKeys) {
  EXPECT_THROW(parse_config(R"({"tua": 1.0})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"integrator": {"step": 0.1}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"model": "thermal_qubit", "E1": 1.0})"), ConfigError);
}

TEST(ParseConfig, RejectsBadValues) {
  EXPECT_THROW(parse_config(R"({"tau": -1})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"mode": "bogus"})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"sweep": {"param": "gamma_down"}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"tau": 1.0, "integrator": {"h": 2.0}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"mc": {"n_traj": 1}})"), ConfigError);
}

TEST(ParseConfig, SyntaxErrorsReportLine) {
  try {
    parse_config("{\n  \"tau\": 1.0,\n  \"mode\" \"single\"\n}");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(ParseConfig, CanonicalFormRoundTrips) {
  const char* inputs[] = {
      "{}",
      R"({"mode": "sweep", "E1": -2, "sweep": {"param": "E2", "start": 0, "stop": 3, "n_points": 4}})",
      R"({"mode": "mc_validate", "model": "thermal_qubit", "energy_gap": 0.3, "mc": {"n_traj": 500, "dt": 0}})",
      R"({"mode": "fuzz", "model": "random", "dim": 3, "feedback_kind": "general_unital",
          "fuzz": {"n_models": 7, "dim_max": 3}})",
  };
  for (const char* text : inputs) {
    const RunConfig c = parse_config(text);
    EXPECT_EQ(parse_config(emit_config(c)), c) << text;
    EXPECT_EQ(emit_config(parse_config(emit_config(c))), emit_config(c));
  }
}

TEST(Parameters, SweepTargetsPerModel) {
  EXPECT_EQ(sweep_parameters(ModelKind::clock).front(), "E0");
  RunConfig c = parse_config("{}");
  EXPECT_DOUBLE_EQ(with_parameter(c, "E1", 2.5).clock.E1, 2.5);
  EXPECT_THROW(with_parameter(c, "energy_gap", 1.0), ConfigError);
}

TEST(Runner, SinglePointPassesChecks) {
  RunConfig c = parse_config(R"({"tau": 1.0})");
  const PointResult r = evaluate_point(c);
  ASSERT_TRUE(r.ok) << r.error;
  EXPECT_FALSE(r.violates());
  EXPECT_EQ(result_row("", std::nullopt, r).size(), result_columns().size());
}

TEST_F(CliRun, SingleWritesArtifacts) {
  ASSERT_EQ(run_cli(R"({"tau": 1.0, "output": {"timeseries": true}})"), 0) << read_file(dir_ / "log.txt");
  EXPECT_TRUE(fs::exists(dir_ / "out" / "result.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "report.json"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "timeseries.csv"));
  const std::string csv = read_file(dir_ / "out" / "result.csv");
  EXPECT_EQ(csv.rfind("param,value,status,error,tau,", 0), 0u);
  EXPECT_NE(csv.find("\r\n"), std::string::npos);
}

TEST_F(CliRun, SweepWritesOneRowPerPoint) {
  ASSERT_EQ(run_cli(R"({"mode": "sweep", "tau": 0.5, "sweep": {"param": "E1", "start": -1, "stop": 1,
                        "n_points": 3}})",
                    "--threads 2"),
            0)
      << read_file(dir_ / "log.txt");
  const std::string csv = read_file(dir_ / "out" / "sweep.csv");
  std::size_t lines = 0;
  for (char ch : csv) lines += ch == '\n';
  EXPECT_EQ(lines, 4u);
}

TEST_F(CliRun, ConfigErrorExitsWithTwo) {
  EXPECT_EQ(run_cli(R"({"tau": "long"})"), 2);
  EXPECT_EQ(run_cli("{ not json"), 2);
  EXPECT_EQ(run_cli(R"({"model": "file", "model_file": "/nonexistent/model.json"})"), 2);
}

TEST_F(CliRun, MissingConfigFileExitsWithTwo) {
  const std::string cmd = std::string(FBTUR_CLI_PATH) + " run --config /nonexistent/cfg.json > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 2);
}

TEST_F(CliRun, NumericalFailureExitsWithThree) {
  // An uncapped RK4 step far beyond the stability region blows up the state.
  EXPECT_EQ(run_cli(R"({"tau": 5.0, "integrator": {"h": 0.5, "max_step_spectral": 0}})"), 3)
      << read_file(dir_ / "log.txt");
}

TEST_F(CliRun, BiasedMonteCarloExitsWithFour) {
  // A step this coarse saturates the first-order jump scheme, so the moments disagree.
  EXPECT_EQ(run_cli(R"({"mode": "mc_validate", "tau": 1.0, "mc": {"n_traj": 20000, "dt": 0.05}})"), 4)
      << read_file(dir_ / "log.txt");
}

TEST_F(CliRun, SeedOverrideIsDeterministic) {
  const std::string cfg = R"({"mode": "fuzz", "model": "random", "fuzz": {"n_models": 3}})";
  ASSERT_EQ(run_cli(cfg, "--seed 5"), 0) << read_file(dir_ / "log.txt");
  const std::string first = read_file(dir_ / "out" / "fuzz.csv");
  ASSERT_EQ(run_cli(cfg, "--seed 5"), 0);
  EXPECT_EQ(read_file(dir_ / "out" / "fuzz.csv"), first);
  ASSERT_EQ(run_cli(cfg, "--seed 6"), 0);
  EXPECT_NE(read_file(dir_ / "out" / "fuzz.csv"), first);
}

}  // namespace
}  // namespace fbtur::cli
