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
#include <iosfwd>
#include <vector>

#include "fbtur/model.hpp"

namespace fbtur {

struct JumpEvent {
  double t = 0.0;
  int k = 0;
  int branch = -1;  // sampled Kraus branch of the feedback map, −1 when no branch is drawn
};

struct TrajectoryRecord {
  std::uint64_t seed = 0;
  std::vector<JumpEvent> events;  // empty unless events were requested
  double current = 0.0;           // J = Σ c_{k_i}
  long n_jumps = 0;
  bool coarse_step = false;       // some step had a single-channel jump probability above 0.1
  CMatrix final_state;            // conditional state at τ
};

struct TrajectoryOptions {
  bool record_events = true;
  /// Use the state-vector path whenever every feedback map is identity or unitary.
  bool allow_pure_state = true;
};

inline constexpr double kCoarseStepWarning = 0.1;

/// First-order jump unraveling on a fixed grid; at most one jump per step, at the end of the step.
TrajectoryRecord simulate_trajectory(const ModelSpec& spec, double tau, double dt, std::uint64_t seed,
                                     const TrajectoryOptions& opts = {});

/// Seed of trajectory `index` in an ensemble with `base_seed`.
std::uint64_t trajectory_seed(std::uint64_t base_seed, std::uint64_t index);

/// dt = 1e-3 divided by the largest total jump rate max eig(Σ L_k†L_k).
double default_trajectory_dt(const ModelSpec& spec);

struct Histogram {
  double lo = 0.0;
  double width = 1.0;
  std::vector<long> counts;
};

struct EnsembleStats {
  long n_traj = 0;
  double mean_J = 0.0;
  double var_J = 0.0;
  double se_mean = 0.0;
  double se_var = 0.0;
  double mean_jumps = 0.0;
  double se_jumps = 0.0;
  double fraction_with_jump = 0.0;
  bool coarse_step = false;
  Histogram histogram;
  CMatrix mean_final_state;
};

struct EnsembleOptions {
  unsigned threads = 0;  // 0 picks the hardware concurrency
  bool pure_state_fast_path = true;
  /// When set, receives every trajectory (with events) in index order.
  std::vector<TrajectoryRecord>* records = nullptr;
};

EnsembleStats run_ensemble(const ModelSpec& spec, double tau, double dt, long n_traj, std::uint64_t base_seed,
                           const EnsembleOptions& opts = {});

/// Summary statistics of a sample, as used by run_ensemble.
EnsembleStats summarize(const std::vector<double>& currents, const std::vector<long>& jumps);

/// Raw dump with columns traj, seed, t, k, branch.
void write_trajectories_csv(std::ostream& out, const std::vector<TrajectoryRecord>& records);

}  // namespace fbtur
