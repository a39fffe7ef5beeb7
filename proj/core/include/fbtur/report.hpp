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

#include <optional>
#include <string>
#include <vector>

#include "fbtur/dynamics.hpp"

namespace fbtur {

inline constexpr double kReportTolerance = 1e-8;
inline constexpr double kZeroMeanThreshold = 1e-12;

struct ThermoReport {
  double tau = 0.0;
  double j_mean = 0.0;
  double j_var = 0.0;
  std::optional<double> delta_j;  // empty when |⟨J⟩| < 1e-12
  double j_phi = 0.0;             // ⟨J⟩_φ
  double s_sys = 0.0;             // S(ρ_τ) − S(ρ_0)
  double s_sys_integral = 0.0;    // ∫ −tr(L[ρ] ln ρ) dt, agrees with s_sys up to integration error
  double s_env = 0.0;
  double s_tot = 0.0;
  double mutual_info = 0.0;
  double big_sigma = 0.0;         // S_tot − I
  double sigma_integral = 0.0;    // ∫ σ dt
  double activity = 0.0;
  double fisher = 0.0;
  double min_sigma_dot = 0.0;
  double min_sigma_rate = 0.0;
  double min_sigma_gap = 0.0;  // min over the grid of Σ̇ − σ

  std::optional<double> var_over_mean_sq;
  std::optional<double> tur_rhs_main;
  std::optional<double> tur_rhs_tight;
  std::optional<double> cramer_rao_rhs;
  std::optional<double> fisher_bound;  // Σ²/(4A) Φ(Σ/2A)⁻²

  bool zero_mean_current() const { return !delta_j.has_value(); }
};

ThermoReport assemble_report(const PropagationState& final_state, double tau, double s0, double s_tau);

/// Convenience: propagate from the model's initial state and assemble the report.
ThermoReport compute_report(const ModelSpec& spec, double tau, const IntegratorConfig& cfg);

struct ReportCheck {
  std::string name;
  bool applicable = false;
  bool passed = true;
  double margin = 0.0;  // lhs − rhs; nonnegative when the inequality holds
};

/// Second law, TUR ordering, Cramér–Rao chain and the Fisher bound, each with absolute slack `tol`.
std::vector<ReportCheck> check_report(const ThermoReport& r, double tol = kReportTolerance);
bool all_checks_pass(const std::vector<ReportCheck>& checks);

namespace io {

/// Fixed CSV column list of a report row.
const std::vector<std::string>& report_columns();
std::vector<std::string> report_values(const ThermoReport& r);
std::string report_to_json(const ThermoReport& r, int indent = 2);

/// %.17g formatting; empty string for missing values.
std::string format_double(double v);
std::string format_optional(const std::optional<double>& v);

std::string csv_escape(const std::string& field);
std::string csv_line(const std::vector<std::string>& fields);

}  // namespace io

}  // namespace fbtur
