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

#include "fbtur/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "fbtur/errors.hpp"

namespace fbtur {

namespace {

// Scalar slots appended after the four vectorized operators.
enum Slot : int { kEnv, kActivity, kMutualInfo, kFisher, kSigma, kCurrentPhi, kJMean, kSysEntropy, kSlots };

struct Layout {
  Eigen::Index d2 = 0;
  Eigen::Index size() const { return 4 * d2 + kSlots; }
  Eigen::Index scalar(int s) const { return 4 * d2 + s; }
};

CVector pack(const PropagationState& s, const Layout& lay) {
  CVector y(lay.size());
  y.segment(0, lay.d2) = linalg::vec(s.rho);
  y.segment(lay.d2, lay.d2) = linalg::vec(s.rho1);
  y.segment(2 * lay.d2, lay.d2) = linalg::vec(s.rho2);
  y.segment(3 * lay.d2, lay.d2) = linalg::vec(s.phi);
  const std::array<double, kSlots> acc{s.acc_env_entropy, s.acc_activity,    s.acc_mutual_info, s.acc_fisher,
                                       s.acc_sigma,       s.acc_current_phi, s.acc_j_mean,      s.acc_sys_entropy};
  for (int i = 0; i < kSlots; ++i) y(lay.scalar(i)) = acc[i];
  return y;
}

void unpack(const CVector& y, const Layout& lay, Eigen::Index dim, PropagationState& s) {
  s.rho = linalg::unvec(y.segment(0, lay.d2), dim);
  s.rho1 = linalg::unvec(y.segment(lay.d2, lay.d2), dim);
  s.rho2 = linalg::unvec(y.segment(2 * lay.d2, lay.d2), dim);
  s.phi = linalg::unvec(y.segment(3 * lay.d2, lay.d2), dim);
  s.acc_env_entropy = y(lay.scalar(kEnv)).real();
  s.acc_activity = y(lay.scalar(kActivity)).real();
  s.acc_mutual_info = y(lay.scalar(kMutualInfo)).real();
  s.acc_fisher = y(lay.scalar(kFisher)).real();
  s.acc_sigma = y(lay.scalar(kSigma)).real();
  s.acc_current_phi = y(lay.scalar(kCurrentPhi)).real();
  s.acc_j_mean = y(lay.scalar(kJMean)).real();
  s.acc_sys_entropy = y(lay.scalar(kSysEntropy)).real();
}

class AugmentedRhs {
 public:
  AugmentedRhs(const ModelSpec& spec, const superop::GeneratorSet& gens)
      : spec_(spec), gens_(gens), lay_{gens.dim * gens.dim} {}

  const Layout& layout() const { return lay_; }

  CVector operator()(const CVector& y, thermo::RateBundle* rates_out = nullptr) const {
    const Eigen::Index d2 = lay_.d2;
    const auto rho = y.segment(0, d2);
    const auto rho1 = y.segment(d2, d2);
    const auto rho2 = y.segment(2 * d2, d2);
    const auto phi = y.segment(3 * d2, d2);
    const CMatrix& g = gens_.feedback.matrix;
    const CMatrix& d1 = gens_.drive1.matrix;

    const thermo::RateBundle r = instantaneous_rates(spec_, gens_, linalg::unvec(rho, gens_.dim),
                                                     linalg::unvec(phi, gens_.dim));
    CVector dy(lay_.size());
    dy.segment(0, d2).noalias() = g * rho;
    const CVector d1_rho = d1 * rho;
    dy.segment(d2, d2).noalias() = g * rho1;
    dy.segment(d2, d2) += d1_rho;
    dy.segment(2 * d2, d2).noalias() = g * rho2;
    dy.segment(2 * d2, d2) += 2.0 * (d1 * rho1) + gens_.drive2.matrix * rho;
    dy.segment(3 * d2, d2).noalias() = g * phi;
    for (const auto& ch : spec_.channels) {
      const double l = r.ell[ch.index];
      if (l != 0.0) dy.segment(3 * d2, d2) += l * (gens_.channel_terms[ch.index] * rho);
    }
    dy(lay_.scalar(kEnv)) = r.s_env_rate;
    dy(lay_.scalar(kActivity)) = r.activity_rate;
    dy(lay_.scalar(kMutualInfo)) = r.mi_rate;
    dy(lay_.scalar(kFisher)) = r.fisher_rate;
    dy(lay_.scalar(kSigma)) = r.sigma_rate;
    dy(lay_.scalar(kCurrentPhi)) = r.j_phi_rate;
    dy(lay_.scalar(kJMean)) = r.j_rate;
    dy(lay_.scalar(kSysEntropy)) = r.s_sys_rate;
    if (rates_out) *rates_out = r;
    return dy;
  }

 private:
  const ModelSpec& spec_;
  const superop::GeneratorSet& gens_;
  Layout lay_;
};

void observe(PropagationState& s, const thermo::RateBundle& r, const PropagationOptions& opts,
             std::size_t step, bool force_sample) {
  s.min_sigma_dot = std::min(s.min_sigma_dot, r.sigma_dot);
  s.min_sigma_rate = std::min(s.min_sigma_rate, r.sigma_rate);
  s.min_sigma_gap = std::min(s.min_sigma_gap, r.sigma_dot - r.sigma_rate);
  if (!opts.samples || opts.sample_every == 0) return;
  if (!force_sample && step % opts.sample_every != 0) return;
  TimeSample row;
  row.t = s.t;
  row.tr_rho = s.rho.trace().real();
  row.s_sys = thermo::von_neumann_entropy(linalg::hermitian_part(s.rho) / row.tr_rho);
  row.rate_env = r.s_env_rate;
  row.rate_mi = r.mi_rate;
  row.rate_sigma = r.sigma_rate;
  row.rate_activity = r.activity_rate;
  row.j_mean_rate = r.j_rate;
  opts.samples->push_back(row);
}

// Hermitize, renormalize and check positivity of an accepted state.
void settle(PropagationState& s, bool renormalize) {
  if (!linalg::is_finite(s.rho) || !linalg::is_finite(s.phi) || !linalg::is_finite(s.rho1) ||
      !linalg::is_finite(s.rho2)) {
    throw PositivityLoss("state became non-finite at t = " + std::to_string(s.t));
  }
  s.rho = linalg::hermitian_part(s.rho);
  s.rho1 = linalg::hermitian_part(s.rho1);
  s.rho2 = linalg::hermitian_part(s.rho2);
  s.phi = linalg::hermitian_part(s.phi);
  const double tr = s.rho.trace().real();
  s.max_trace_drift = std::max(s.max_trace_drift, std::abs(tr - 1.0));
  if (renormalize) s.rho /= tr;
  const double min_eig = linalg::herm_eigenvalues(s.rho).minCoeff();
  if (min_eig < -kPositivityLossTolerance) {
    throw PositivityLoss("min eigenvalue " + std::to_string(min_eig) + " at t = " + std::to_string(s.t) +
                         "; reduce the step");
  }
  // A stable step keeps the counting variance nonnegative.
  const double m1 = s.rho1.trace().real();
  const double m2 = s.rho2.trace().real();
  if (m2 - m1 * m1 < -kMomentTolerance * std::max(1.0, std::abs(m2))) {
    throw ConvergenceFailure("counting variance " + std::to_string(m2 - m1 * m1) + " at t = " +
                             std::to_string(s.t) + "; reduce the step");
  }
}

void check_config(double tau, const IntegratorConfig& cfg) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidParameter("tau must be positive and finite");
  if (!(cfg.h > 0.0)) throw InvalidParameter("integrator step must be positive");
  if (cfg.h > tau) throw InvalidParameter("integrator step exceeds tau");
  if (cfg.method == IntegratorMethod::rk45_adaptive && !(cfg.abs_tol > 0.0 && cfg.rel_tol > 0.0)) {
    throw InvalidParameter("adaptive tolerances must be positive");
  }
}

PropagationState run_rk4(const AugmentedRhs& f, PropagationState s, double tau, const IntegratorConfig& cfg,
                         const superop::GeneratorSet& gens, const PropagationOptions& opts) {
  double h = cfg.h;
  if (cfg.max_step_spectral > 0.0 && gens.spectral_radius > 0.0) {
    h = std::min(h, cfg.max_step_spectral / gens.spectral_radius);
  }
  const auto n = static_cast<std::size_t>(std::ceil(tau / h - 1e-9));
  h = tau / static_cast<double>(n);
  const Layout& lay = f.layout();
  const Eigen::Index dim = s.rho.rows();
  for (std::size_t i = 0; i < n; ++i) {
    CVector y = pack(s, lay);
    thermo::RateBundle r;
    const CVector k1 = f(y, &r);
    observe(s, r, opts, i, false);
    const CVector k2 = f(y + 0.5 * h * k1);
    const CVector k3 = f(y + 0.5 * h * k2);
    const CVector k4 = f(y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    unpack(y, lay, dim, s);
    s.t = tau * static_cast<double>(i + 1) / static_cast<double>(n);
    ++s.steps;
    settle(s, cfg.renormalize_trace);
  }
  return s;
}

// Dormand–Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                 b6 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

PropagationState run_rk45(const AugmentedRhs& f, PropagationState s, double tau, const IntegratorConfig& cfg,
                          const PropagationOptions& opts) {
  const Layout& lay = f.layout();
  const Eigen::Index dim = s.rho.rows();
  const double h_min = 1e-12 * tau;
  double h = cfg.h;
  std::size_t accepted = 0;
  while (s.t < tau) {
    const bool last = s.t + h >= tau * (1.0 - 1e-14);
    const double step = last ? tau - s.t : h;
    CVector y = pack(s, lay);
    thermo::RateBundle r;
    const CVector k1 = f(y, &r);
    const CVector k2 = f(y + step * a21 * k1);
    const CVector k3 = f(y + step * (a31 * k1 + a32 * k2));
    const CVector k4 = f(y + step * (a41 * k1 + a42 * k2 + a43 * k3));
    const CVector k5 = f(y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const CVector k6 = f(y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const CVector y_new = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const CVector k7 = f(y_new);
    const CVector err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double norm = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
      const double scale = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y(i)), std::abs(y_new(i)));
      norm = std::max(norm, std::abs(err(i)) / scale);
    }
    if (!std::isfinite(norm)) norm = 1e10;
    const double factor = norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
    if (norm <= 1.0) {
      observe(s, r, opts, accepted, false);
      unpack(y_new, lay, dim, s);
      s.t = last ? tau : s.t + step;
      ++s.steps;
      ++accepted;
      settle(s, cfg.renormalize_trace);
    }
    h = step * factor;
    if (h < h_min && s.t < tau) {
      throw StepUnderflow("adaptive step fell below 1e-12 tau at t = " + std::to_string(s.t));
    }
  }
  return s;
}

}  // namespace

PropagationState initial_propagation_state(const CMatrix& rho0) {
  PropagationState s;
  s.rho = linalg::hermitian_part(rho0);
  s.rho1 = CMatrix::Zero(rho0.rows(), rho0.cols());
  s.rho2 = s.rho1;
  s.phi = s.rho1;
  return s;
}

thermo::RateBundle instantaneous_rates(const ModelSpec& spec, const superop::GeneratorSet& gens,
                                       const CMatrix& rho, const CMatrix& phi) {
  linalg::HermitianEig eig = linalg::herm_eig(linalg::hermitian_part(rho));
  eig.eigenvalues = eig.eigenvalues.cwiseMax(0.0);
  return thermo::evaluate_rates(spec, gens, eig, phi);
}

PropagationState propagate(const ModelSpec& spec, double tau, const IntegratorConfig& cfg,
                           const PropagationOptions& opts) {
  require_valid(spec);
  const superop::GeneratorSet gens = superop::build_generators(spec);
  return propagate(spec, gens, spec.initial_state, tau, cfg, opts);
}

PropagationState propagate(const ModelSpec& spec, const superop::GeneratorSet& gens, const CMatrix& rho0,
                           double tau, const IntegratorConfig& cfg, const PropagationOptions& opts) {
  check_config(tau, cfg);
  if (rho0.rows() != spec.dim || rho0.cols() != spec.dim || gens.dim != spec.dim) {
    throw DimensionMismatch("initial state or generators do not match the model dimension");
  }
  linalg::require_finite(rho0, "initial state");
  const AugmentedRhs f(spec, gens);
  PropagationState s = initial_propagation_state(rho0);
  s = cfg.method == IntegratorMethod::rk4_fixed ? run_rk4(f, std::move(s), tau, cfg, gens, opts)
                                                : run_rk45(f, std::move(s), tau, cfg, opts);
  const thermo::RateBundle r = instantaneous_rates(spec, gens, s.rho, s.phi);
  observe(s, r, opts, 0, true);
  return s;
}

CMatrix steady_state(const ModelSpec& spec) {
  require_valid(spec);
  return steady_state(superop::build_generators(spec));
}

CMatrix steady_state(const superop::GeneratorSet& gens) {
  const Eigen::MatrixXcd g = gens.feedback.matrix;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(g, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double tol = 1e-9 * std::max(1.0, sv(0));
  Eigen::Index null_dim = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) null_dim += sv(i) <= tol ? 1 : 0;
  if (null_dim > 1) {
    throw DegenerateStationarySpace("stationary space has dimension " + std::to_string(null_dim));
  }
  const CVector v = svd.matrixV().col(sv.size() - 1);
  CMatrix rho = linalg::unvec(v, gens.dim);
  const cplx tr = rho.trace();
  if (std::abs(tr) < 1e-300) throw ConvergenceFailure("null vector of the generator is traceless");
  rho = linalg::hermitian_part(rho / tr);
  return rho / rho.trace().real();
}

std::string_view to_string(IntegratorMethod m) {
  return m == IntegratorMethod::rk4_fixed ? "rk4_fixed" : "rk45_adaptive";
}

IntegratorMethod integrator_method_from_string(std::string_view name) {
  if (name == "rk4_fixed") return IntegratorMethod::rk4_fixed;
  if (name == "rk45_adaptive") return IntegratorMethod::rk45_adaptive;
  throw InvalidParameter("unknown integrator method '" + std::string(name) + "'");
}

}  // namespace fbtur
