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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fbtur/dynamics.hpp"
#include "fbtur/errors.hpp"
#include "fbtur/models.hpp"

namespace fbtur::cli {

class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class Mode { single, sweep, mc_validate, fuzz };
enum class ModelKind { clock, thermal_qubit, random, file };
enum class InitialState { steady, model };

struct ThermalQubitParams {
  double beta = 1.0;
  double energy_gap = 1.0;
  double gamma_down = 1.0;

  bool operator==(const ThermalQubitParams&) const = default;
};

struct SweepConfig {
  std::string param = "E1";
  double start = -5.0;
  double stop = 5.0;
  int n_points = 51;

  bool operator==(const SweepConfig&) const = default;
};

struct McConfig {
  long n_traj = 100000;
  double dt = 1e-4;  // 0 selects 1e-3 over the largest total jump rate
  std::uint64_t base_seed = 1;

  bool operator==(const McConfig&) const = default;
};

struct FuzzConfig {
  int n_models = 100;
  int dim_min = 2;
  int dim_max = 4;
  int n_pairs_min = 1;
  int n_pairs_max = 3;
  models::RandomFeedback feedback = models::RandomFeedback::mixed;
  std::uint64_t base_seed = 0;
  double comparison_dt = 1e-6;

  bool operator==(const FuzzConfig&) const = default;
};

struct OutputConfig {
  std::string dir = "out";
  bool csv = true;
  bool json = true;
  bool timeseries = false;
  int timeseries_every = 10;
  bool trajectories = false;

  bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
  Mode mode = Mode::single;
  ModelKind model = ModelKind::clock;
  models::ClockParams clock;
  ThermalQubitParams thermal;
  models::RandomModelOptions random;
  std::string model_file;
  double tau = 1.0;
  InitialState initial_state = InitialState::steady;
  IntegratorConfig integrator;
  SweepConfig sweep;
  McConfig mc;
  FuzzConfig fuzz;
  OutputConfig output;
  unsigned threads = 0;

  bool operator==(const RunConfig&) const = default;
};

/// Parses JSON text. Errors name the offending line or field.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical JSON with every field written out; parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& c);

/// Parameters that a sweep may vary for the chosen model.
std::vector<std::string> sweep_parameters(ModelKind kind);

/// Returns a copy of `c` with the named model parameter replaced.
RunConfig with_parameter(const RunConfig& c, const std::string& name, double value);

/// Builds the model described by the configuration.
ModelSpec build_model(const RunConfig& c);

}  // namespace fbtur::cli
