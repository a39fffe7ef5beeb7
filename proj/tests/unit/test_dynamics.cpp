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

#include <cmath>

#include "fbtur/dynamics.hpp"
#include "fbtur/errors.hpp"
#include "fbtur/models.hpp"
#include "fbtur/report.hpp"
#include "fbtur/superop.hpp"
#include "fbtur/thermo.hpp"
#include "support/oracles.hpp"

namespace fbtur {
namespace {

IntegratorConfig rk4(double h) {
  IntegratorConfig cfg;
  cfg.h = h;
  return cfg;
}

ModelSpec clock_at_steady_state() {
  ModelSpec spec = models::build_clock({});
  spec.initial_state = steady_state(spec);
  return spec;
}

// Rescales every channel by √(1 + θℓ_k), which multiplies its generator term by 1 + θℓ_k.
ModelSpec tilted_by_ell(const ModelSpec& spec, const std::vector<double>& ell, double theta) {
  ModelSpec out = spec;
  for (auto& ch : out.channels) ch.op *= std::sqrt(1.0 + theta * ell[ch.index]);
  return out;
}

TEST(SteadyState, ThermalQubitIsGibbs) {
  const ModelSpec spec = thermal_qubit(0.8, 1.5, 3.0);
  EXPECT_LE(linalg::max_abs(steady_state(spec) - gibbs_state(spec.hamiltonian, 0.8)), 1e-12);
}

TEST(SteadyState, ClockIsStationaryAndMatchesLongTimeLimit) {
  const ModelSpec spec = models::build_clock({});
  const CMatrix ss = steady_state(spec);
  EXPECT_NEAR(ss.trace().real(), 1.0, 1e-14);
  EXPECT_LE(linalg::max_abs(oracle::master_rhs(spec, ss)), 1e-8);
  EXPECT_LE(linalg::max_abs(ss - oracle::long_time_state(spec, spec.initial_state, 50.0)), 1e-6);
  EXPECT_GE(linalg::herm_eigenvalues(ss).minCoeff(), 0.0);
}

TEST(SteadyState, WithoutFeedbackClockRelaxesToGibbs) {
  models::ClockParams p;
  p.E1 = 0.4;
  p.feedback_on = false;
  const ModelSpec spec = models::build_clock(p);
  EXPECT_LE(linalg::max_abs(steady_state(spec) - gibbs_state(spec.hamiltonian, p.beta)), 1e-12);
}

TEST(SteadyState, DegenerateGeneratorIsRejected) {
  ModelSpec spec = thermal_qubit(1.0, 1.0, 1.0);
  ModelSpec doubled;
  doubled.dim = 4;
  doubled.hamiltonian = CMatrix::Zero(4, 4);
  doubled.initial_state = linalg::identity(4) / 4.0;
  // Two decoupled qubits: the stationary space is two-dimensional.
  for (int block = 0; block < 2; ++block) {
    for (const auto& ch : spec.channels) {
      JumpChannel c = ch;
      c.index = block * 2 + ch.index;
      c.pair = block * 2 + ch.pair;
      c.op = CMatrix::Zero(4, 4);
      c.op.block(2 * block, 2 * block, 2, 2) = ch.op;
      doubled.channels.push_back(c);
      doubled.feedback[c.index] = FeedbackChannel::identity_map(4);
    }
  }
  ASSERT_TRUE(validate(doubled).ok()) << validate(doubled).summary();
  EXPECT_THROW(steady_state(doubled), DegenerateStationarySpace);
}

TEST(Propagation, EquilibriumProducesNothing) {
  const ModelSpec spec = thermal_qubit(1.0, 1.0, 1.0);
  const ThermoReport r = compute_report(spec, 5.0, rk4(1e-3));
  EXPECT_NEAR(r.j_mean, 0.0, 1e-12);
  EXPECT_NEAR(r.big_sigma, 0.0, 1e-10);
  EXPECT_NEAR(r.s_env, 0.0, 1e-10);
  EXPECT_NEAR(r.sigma_integral, 0.0, 1e-10);
  EXPECT_EQ(r.mutual_info, 0.0);
  EXPECT_TRUE(r.zero_mean_current());
  EXPECT_GT(r.j_var, 0.0);
}

TEST(Propagation, TracePreservedAndStatePositive) {
  const ModelSpec spec = models::build_clock({});
  const PropagationState s = propagate(spec, 3.0, rk4(1e-3));
  EXPECT_LE(s.max_trace_drift, 1e-10);
  EXPECT_GE(linalg::herm_eigenvalues(s.rho).minCoeff(), -1e-12);
  EXPECT_LE(linalg::max_abs(s.rho - oracle::evolve(spec, spec.initial_state, 3.0)), 1e-9);
  EXPECT_NEAR(s.t, 3.0, 1e-12);
  EXPECT_EQ(s.steps, 3000u);
}

TEST(Propagation, MomentsMatchGeneratingFunction) {
  std::vector<ModelSpec> specs{models::build_clock({}), clock_at_steady_state()};
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    specs.push_back(models::random_model(3, 2, seed, models::RandomFeedback::mixed));
  }
  for (const auto& spec : specs) {
    const double tau = 1.5;
    const ThermoReport r = compute_report(spec, tau, rk4(1e-3));
    const auto m = oracle::current_moments(spec, spec.initial_state, tau);
    EXPECT_NEAR(r.j_mean, m.mean, 1e-6 * std::max(1.0, std::abs(m.mean)));
    EXPECT_NEAR(r.j_var, m.variance(), 1e-5 * std::max(1.0, m.variance()));
  }
}

TEST(Propagation, ResponseToEllTiltMatchesFiniteDifference) {
  const ModelSpec spec = clock_at_steady_state();
  const double tau = 2.0;
  const ThermoReport r = compute_report(spec, tau, rk4(1e-3));
  const auto ell = thermo::ell(spec, spec.initial_state);
  const double dtheta = 1e-3;
  const double up = oracle::current_moments(tilted_by_ell(spec, ell, dtheta), spec.initial_state, tau).mean;
  const double down = oracle::current_moments(tilted_by_ell(spec, ell, -dtheta), spec.initial_state, tau).mean;
  // ∂_θ⟨J⟩_θ = ⟨J⟩ + ⟨J⟩_φ.
  const double expected = (up - down) / (2.0 * dtheta) - r.j_mean;
  EXPECT_NEAR(r.j_phi, expected, 1e-5 * std::max(1.0, std::abs(expected)));
  ASSERT_TRUE(r.delta_j.has_value());
  EXPECT_NEAR(*r.delta_j, r.j_phi / r.j_mean, 1e-12);
}

TEST(Propagation, DeltaVanishesLinearlyAtShortTimes) {
  const ModelSpec spec = clock_at_steady_state();
  double prev_ratio = 0.0;
  for (double tau : {1e-3, 1e-2}) {
    const ThermoReport r = compute_report(spec, tau, rk4(tau / 100.0));
    ASSERT_TRUE(r.delta_j.has_value());
    const double ratio = std::abs(*r.delta_j) / tau;
    EXPECT_TRUE(std::isfinite(ratio));
    if (prev_ratio > 0.0) EXPECT_NEAR(ratio / prev_ratio, 1.0, 0.5);
    prev_ratio = ratio;
  }
}

TEST(Propagation, PhiStaysTraceless) {
  const ModelSpec spec = models::random_model(3, 3, 8, models::RandomFeedback::general_unital);
  const PropagationState s = propagate(spec, 2.0, rk4(1e-3));
  EXPECT_LE(std::abs(s.phi.trace()), 1e-10);
}

TEST(Propagation, HalvingStepChangesLittle) {
  const ModelSpec spec = models::build_clock({});
  const ThermoReport a = compute_report(spec, 2.0, rk4(1e-3));
  const ThermoReport b = compute_report(spec, 2.0, rk4(5e-4));
  EXPECT_NEAR(a.j_mean, b.j_mean, 1e-6);
  EXPECT_NEAR(a.j_var, b.j_var, 1e-6);
  EXPECT_NEAR(a.big_sigma, b.big_sigma, 1e-6);
  EXPECT_NEAR(a.mutual_info, b.mutual_info, 1e-6);
  EXPECT_NEAR(a.fisher, b.fisher, 1e-6);
}

TEST(Propagation, AdaptiveAgreesWithFixedStep) {
  const ModelSpec spec = models::build_clock({});
  IntegratorConfig adaptive;
  adaptive.method = IntegratorMethod::rk45_adaptive;
  adaptive.h = 1e-2;
  const ThermoReport a = compute_report(spec, 2.0, rk4(5e-4));
  const ThermoReport b = compute_report(spec, 2.0, adaptive);
  EXPECT_NEAR(a.j_mean, b.j_mean, 1e-6);
  EXPECT_NEAR(a.j_var, b.j_var, 1e-6);
  EXPECT_NEAR(a.big_sigma, b.big_sigma, 1e-6);
}

TEST(Propagation, AccumulatorsAreMonotone) {
  const ModelSpec spec = models::build_clock({});
  double prev_activity = 0.0;
  double prev_sigma = 0.0;
  for (double tau : {0.5, 1.0, 2.0, 4.0}) {
    const PropagationState s = propagate(spec, tau, rk4(1e-3));
    EXPECT_GT(s.acc_activity, prev_activity);
    EXPECT_GE(s.acc_sigma, prev_sigma);
    EXPECT_GE(s.acc_fisher, 0.0);
    prev_activity = s.acc_activity;
    prev_sigma = s.acc_sigma;
  }
}

TEST(Propagation, SystemEntropyRouteAgreesWithEndpoints) {
  const ModelSpec spec = models::random_model(3, 2, 4, models::RandomFeedback::mixed);
  const ThermoReport r = compute_report(spec, 2.0, rk4(1e-3));
  EXPECT_NEAR(r.s_sys, r.s_sys_integral, 1e-6);
  EXPECT_NEAR(r.big_sigma, r.s_sys + r.s_env - r.mutual_info, 1e-12);
  EXPECT_NEAR(r.s_tot, r.s_sys + r.s_env, 1e-12);
  EXPECT_GE(r.big_sigma, r.sigma_integral - 1e-6);
}

TEST(Propagation, SamplesAreRecorded) {
  const ModelSpec spec = models::build_clock({});
  std::vector<TimeSample> samples;
  PropagationOptions opts;
  opts.sample_every = 100;
  opts.samples = &samples;
  propagate(spec, 1.0, rk4(1e-3), opts);
  ASSERT_GE(samples.size(), 10u);
  EXPECT_NEAR(samples.front().t, 0.0, 1e-15);
  EXPECT_NEAR(samples.back().t, 1.0, 1e-12);
  for (const auto& row : samples) EXPECT_NEAR(row.tr_rho, 1.0, 1e-10);
}

TEST(Propagation, RejectsBadConfig) {
  const ModelSpec spec = models::build_clock({});
  EXPECT_THROW(propagate(spec, -1.0, rk4(1e-3)), InvalidParameter);
  EXPECT_THROW(propagate(spec, 1.0, rk4(0.0)), InvalidParameter);
  EXPECT_THROW(propagate(spec, 1e-4, rk4(1e-3)), InvalidParameter);
}

TEST(Propagation, MeanCurrentIsLinearFromStationaryStart) {
  const ModelSpec spec = clock_at_steady_state();
  const ThermoReport a = compute_report(spec, 1.0, rk4(1e-3));
  const ThermoReport b = compute_report(spec, 4.0, rk4(1e-3));
  ASSERT_TRUE(a.delta_j && b.delta_j);
  EXPECT_NEAR(b.j_mean / a.j_mean, 4.0, 1e-8);
  EXPECT_NEAR(b.activity / a.activity, 4.0, 1e-8);
}

TEST(Propagation, UnstableStepIsReported) {
  // The stationary state is a fixed point of any step, but the counting moments are not.
  const ModelSpec spec = clock_at_steady_state();
  IntegratorConfig cfg = rk4(0.5);
  cfg.max_step_spectral = 0.0;
  EXPECT_THROW(propagate(spec, 5.0, cfg), ConvergenceFailure);
  cfg.max_step_spectral = 0.5;
  EXPECT_NO_THROW(propagate(spec, 5.0, cfg));
}

TEST(IntegratorMethodNames, RoundTrip) {
  for (auto m : {IntegratorMethod::rk4_fixed, IntegratorMethod::rk45_adaptive}) {
    EXPECT_EQ(integrator_method_from_string(to_string(m)), m);
  }
  EXPECT_THROW(integrator_method_from_string("euler"), InvalidParameter);
}

}  // namespace
}  // namespace fbtur
