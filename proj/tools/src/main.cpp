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

#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fbtur/config.hpp"
#include "fbtur/runner.hpp"

int main(int argc, char** argv) {
  using namespace fbtur::cli;
  CLI::App app{"Feedback-controlled open quantum systems: currents, entropy production and uncertainty bounds"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> seed;
  bool print_config = false;
  CLI::App* run_cmd = app.add_subcommand("run", "Run a configuration file");
  run_cmd->add_option("--config", config_path, "Run configuration (JSON)")->required();
  run_cmd->add_option("--out", out_dir, "Output directory (overrides output.dir)");
  run_cmd->add_option("--threads", threads, "Worker threads, 0 = hardware concurrency");
  run_cmd->add_option("--seed", seed, "Base seed for trajectories, fuzzing and random models");
  run_cmd->add_flag("--print-config", print_config, "Print the canonical configuration before running");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigFailure;
  }

  try {
    RunConfig cfg = load_config(config_path);
    if (out_dir) cfg.output.dir = *out_dir;
    if (threads) cfg.threads = *threads;
    if (seed) {
      cfg.mc.base_seed = *seed;
      cfg.fuzz.base_seed = *seed;
      cfg.random.seed = *seed;
    }
    if (print_config) std::cout << emit_config(cfg);
    return run(cfg, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigFailure;
  } catch (const fbtur::Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
}
