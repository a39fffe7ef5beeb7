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

#include <cstddef>
#include <functional>
#include <limits>
#include <string_view>
#include <vector>

#include "fbtur/linalg.hpp"
#include "fbtur/model.hpp"
#include "fbtur/superop.hpp"
#include "fbtur/thermo.hpp"

namespace fbtur {

struct PropagationState {
  double t = 0.0;
  CMatrix rho;
  CMatrix rho1;
  CMatrix rho2;
  CMatrix phi;

  double acc_env_entropy = 0.0;
  double acc_activity = 0.0;
  double acc_mutual_info = 0.0;
  double acc_fisher = 0.0;
  double acc_sigma = 0.0;
  double acc_current_phi = 0.0;
  double acc_j_mean = 0.0;       // ∫ Σ c_k tr(L_k ρ L_k†) dt
  double acc_sys_entropy = 0.0;  // ∫ −tr(L[ρ] ln ρ) dt

  double min_sigma_dot = std::numeric_limits<double>::infinity();
  double min_sigma_rate = std::numeric_limits<double>::infinity();
  double min_sigma_gap = std::numeric_limits<double>::infinity();  // min over steps of Σ̇ − σ
  double max_trace_drift = 0.0;  // largest |tr ρ − 1| removed by renormalization
  std::size_t steps = 0;
};

enum class IntegratorMethod { rk4_fixed, rk45_adaptive };

struct IntegratorConfig {
  double h = 1e-3;  // RK4 step, or initial step for RK45
  IntegratorMethod method = IntegratorMethod::rk4_fixed;
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  bool renormalize_trace = true;
  /// RK4 only: cap the step so that h · ρ(𝓛) stays below this value. Zero disables the cap.
  double max_step_spectral = 0.5;

  bool operator==(const IntegratorConfig&) const = default;
};

struct TimeSample {
  double t = 0.0;
  double tr_rho = 0.0;
  double s_sys = 0.0;
  double rate_env = 0.0;
  double rate_mi = 0.0;
  double rate_sigma = 0.0;
  double rate_activity = 0.0;
  double j_mean_rate = 0.0;
};

struct PropagationOptions {
  /// Record a TimeSample every `sample_every` accepted steps (0 disables sampling).
  std::size_t sample_every = 0;
  std::vector<TimeSample>* samples = nullptr;
};

inline constexpr double kPositivityLossTolerance = 1e-6;
/// Relative slack on Var[J] ≥ 0 before a step is declared unstable.
inline constexpr double kMomentTolerance = 1e-8;

PropagationState initial_propagation_state(const CMatrix& rho0);

/// Integrates ρ, the current moments, φ and every accumulator from t = 0 to τ.
PropagationState propagate(const ModelSpec& spec, double tau, const IntegratorConfig& cfg,
                           const PropagationOptions& opts = {});
PropagationState propagate(const ModelSpec& spec, const superop::GeneratorSet& gens, const CMatrix& rho0,
                           double tau, const IntegratorConfig& cfg, const PropagationOptions& opts = {});

/// Unique stationary state of the feedback generator.
CMatrix steady_state(const ModelSpec& spec);
CMatrix steady_state(const superop::GeneratorSet& gens);

/// Rates at ρ after clamping small negative eigenvalues to zero.
thermo::RateBundle instantaneous_rates(const ModelSpec& spec, const superop::GeneratorSet& gens,
                                       const CMatrix& rho, const CMatrix& phi);

std::string_view to_string(IntegratorMethod m);
IntegratorMethod integrator_method_from_string(std::string_view name);

}  // namespace fbtur
