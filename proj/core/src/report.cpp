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

#include "fbtur/report.hpp"

#include <cmath>

#include "fbtur/errors.hpp"
#include "fbtur/thermo.hpp"

namespace fbtur {

namespace {

constexpr double kNegligibleFisher = 1e-15;

ReportCheck inequality(std::string name, const std::optional<double>& lhs, const std::optional<double>& rhs,
                       double tol) {
  ReportCheck c;
  c.name = std::move(name);
  c.applicable = lhs.has_value() && rhs.has_value() && std::isfinite(*lhs) && std::isfinite(*rhs);
  if (c.applicable) {
    c.margin = *lhs - *rhs;
    c.passed = c.margin >= -tol;
  }
  return c;
}

}  // namespace

ThermoReport assemble_report(const PropagationState& s, double tau, double s0, double s_tau) {
  ThermoReport r;
  r.tau = tau;
  r.j_mean = s.rho1.trace().real();
  r.j_var = s.rho2.trace().real() - r.j_mean * r.j_mean;
  r.j_phi = s.acc_current_phi;
  r.s_sys = s_tau - s0;
  r.s_sys_integral = s.acc_sys_entropy;
  r.s_env = s.acc_env_entropy;
  r.s_tot = r.s_sys + r.s_env;
  r.mutual_info = s.acc_mutual_info;
  r.big_sigma = r.s_tot - r.mutual_info;
  r.sigma_integral = s.acc_sigma;
  r.activity = s.acc_activity;
  r.fisher = s.acc_fisher;
  r.min_sigma_dot = s.min_sigma_dot;
  r.min_sigma_rate = s.min_sigma_rate;
  r.min_sigma_gap = s.min_sigma_gap;

  if (std::abs(r.j_mean) >= kZeroMeanThreshold) {
    r.delta_j = r.j_phi / r.j_mean;
    r.var_over_mean_sq = r.j_var / (r.j_mean * r.j_mean);
  }
  const bool sigma_positive = r.big_sigma > 0.0;
  const bool activity_positive = r.activity > 0.0;
  if (sigma_positive && activity_positive) {
    const double x = r.big_sigma / (2.0 * r.activity);
    r.fisher_bound = r.activity * thermo::phi_ratio_sq(x);
  }
  if (!r.delta_j) return r;

  const double lift = (1.0 + *r.delta_j) * (1.0 + *r.delta_j);
  if (sigma_positive) {
    r.tur_rhs_main = 2.0 * lift / r.big_sigma;
    if (activity_positive) {
      // (1+δ)² 4A/Σ² Φ(x)² with x = Σ/2A, written to stay finite for small x.
      const double x = r.big_sigma / (2.0 * r.activity);
      const double phi = thermo::phi_fn(x);
      r.tur_rhs_tight = lift * 2.0 * (phi * phi / x) / r.big_sigma;
    }
  }
  if (r.fisher > kNegligibleFisher) r.cramer_rao_rhs = r.j_mean * r.j_mean * lift / r.fisher;
  return r;
}

ThermoReport compute_report(const ModelSpec& spec, double tau, const IntegratorConfig& cfg) {
  const PropagationState s = propagate(spec, tau, cfg);
  return assemble_report(s, tau, thermo::von_neumann_entropy(spec.initial_state),
                         thermo::von_neumann_entropy(s.rho));
}

std::vector<ReportCheck> check_report(const ThermoReport& r, double tol) {
  std::vector<ReportCheck> out;
  out.push_back(inequality("second_law", r.big_sigma, 0.0, tol));
  out.push_back(inequality("sigma_dot_nonnegative", r.min_sigma_dot, 0.0, tol));
  out.push_back(inequality("sigma_rate_nonnegative", r.min_sigma_rate, 0.0, tol));
  out.push_back(inequality("sigma_below_sigma_dot", r.min_sigma_gap, 0.0, tol));
  out.push_back(inequality("tur_main", r.var_over_mean_sq, r.tur_rhs_main, tol));
  out.push_back(inequality("tur_tight", r.var_over_mean_sq, r.tur_rhs_tight, tol));
  out.push_back(inequality("tur_ordering", r.tur_rhs_tight, r.tur_rhs_main, tol));
  out.push_back(inequality("cramer_rao", r.j_var, r.cramer_rao_rhs, tol));
  out.push_back(inequality("fisher_bound", r.fisher_bound, r.fisher, tol));
  return out;
}

bool all_checks_pass(const std::vector<ReportCheck>& checks) {
  for (const auto& c : checks) {
    if (c.applicable && !c.passed) return false;
  }
  return true;
}

}  // namespace fbtur
