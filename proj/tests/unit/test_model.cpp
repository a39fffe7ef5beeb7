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
#include <filesystem>

#include "fbtur/dynamics.hpp"
#include "fbtur/errors.hpp"
#include "fbtur/model.hpp"
#include "fbtur/model_io.hpp"
#include "fbtur/models.hpp"

namespace fbtur {
namespace {

TEST(Validate, ClockModelIsValid) {
  const auto report = validate(models::build_clock({}));
  EXPECT_TRUE(report.ok()) << report.summary();
}

TEST(Validate, SymmetricCountingWeightsAreFlagged) {
  ModelSpec spec = thermal_qubit(1.0, 1.0, 1.0);
  spec.channels[0].weight = 1.0;
  spec.channels[1].weight = 1.0;
  const auto report = validate(spec);
  ASSERT_TRUE(report.has("counting antisymmetry"));
  EXPECT_NEAR(report.find("counting antisymmetry")->residual, 2.0, 1e-15);
}

TEST(Validate, NonUnitalKrausListIsFlagged) {
  ModelSpec spec = thermal_qubit(1.0, 1.0, 1.0);
  CMatrix k = CMatrix::Zero(2, 2);
  k(0, 0) = 1.0;
  spec.feedback[0] = FeedbackChannel::mixture({k});
  const auto report = validate(spec);
  EXPECT_TRUE(report.has("trace-preserving"));
  EXPECT_TRUE(report.has("unital"));
  EXPECT_THROW(require_valid(spec), InvalidModel);
}

TEST(Validate, DetailedBalanceMismatchIsFlagged) {
  ModelSpec spec = thermal_qubit(1.0, 1.0, 1.0);
  spec.channels[0].delta_s += 0.1;
  spec.channels[1].delta_s -= 0.1;
  const auto report = validate(spec);
  EXPECT_TRUE(report.has("local detailed balance"));
  EXPECT_FALSE(report.has("entropy antisymmetry"));
}

TEST(Validate, BrokenPairingIsFlagged) {
  ModelSpec spec = models::build_clock({});
  spec.channels[0].pair = 2;
  EXPECT_TRUE(validate(spec).has("pairing involution"));
}

TEST(Validate, ZeroJumpOperatorIsRejected) {
  ModelSpec spec = thermal_qubit(1.0, 1.0, 1.0);
  spec.channels[1].op.setZero();
  EXPECT_TRUE(validate(spec).has("nonzero jump operator"));
}

TEST(Validate, MissingFeedbackEntryIsFlagged) {
  ModelSpec spec = thermal_qubit(1.0, 1.0, 1.0);
  spec.feedback.erase(1);
  EXPECT_TRUE(validate(spec).has("feedback entry"));
  EXPECT_THROW(spec.feedback_for(1), InvalidModel);
}

TEST(Validate, UnitaryTagRequiresUnitary) {
  ModelSpec spec = thermal_qubit(1.0, 1.0, 1.0);
  CMatrix u = linalg::identity(2);
  u(0, 0) = 2.0;
  spec.feedback[0] = FeedbackChannel{{u}, FeedbackKind::unitary};
  EXPECT_TRUE(validate(spec).has("unitary feedback"));
}

TEST(Validate, InitialStateMustBeNormalizedAndPositive) {
  ModelSpec spec = thermal_qubit(1.0, 1.0, 1.0);
  spec.initial_state *= 1.01;
  EXPECT_TRUE(validate(spec).has("initial state trace"));
  spec.initial_state = CMatrix::Zero(2, 2);
  spec.initial_state(0, 0) = 1.2;
  spec.initial_state(1, 1) = -0.2;
  EXPECT_TRUE(validate(spec).has("initial state positive"));
}

TEST(Validate, SelfPairedChannelNeedsZeroWeights) {
  ModelSpec spec = thermal_qubit(1.0, 1.0, 1.0);
  JumpChannel dephasing{2, CMatrix::Identity(2, 2) * 0.3, 0.0, 2, 0.0};
  dephasing.op(1, 1) = -0.3;
  spec.channels.push_back(dephasing);
  spec.feedback[2] = FeedbackChannel::identity_map(2);
  EXPECT_TRUE(validate(spec).ok()) << validate(spec).summary();
  spec.channels[2].weight = 1.0;
  EXPECT_TRUE(validate(spec).has("counting antisymmetry"));
}

TEST(ThermalQubit, UpwardAmplitude) {
  const ModelSpec spec = thermal_qubit(1.0, 1.0, 1.0);
  EXPECT_NEAR(std::abs(spec.channels[1].op(1, 0)), std::sqrt(std::exp(-1.0)), 1e-15);
  EXPECT_NEAR(std::abs(spec.channels[1].op(1, 0)), 0.60653, 1e-5);
  EXPECT_NEAR(spec.channels[0].delta_s, 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(spec.channels[0].weight, -spec.channels[1].weight);
}

TEST(ThermalQubit, ValidForPositiveInputs) {
  for (double beta : {0.1, 1.0, 3.0}) {
    for (double gap : {-2.0, 0.0, 0.5, 4.0}) {
      for (double g : {1e-3, 1.0, 50.0}) EXPECT_TRUE(validate(thermal_qubit(beta, gap, g)).ok());
    }
  }
}

TEST(ThermalQubit, RejectsBadParameters) {
  EXPECT_THROW(thermal_qubit(0.0, 1.0, 1.0), InvalidParameter);
  EXPECT_THROW(thermal_qubit(1.0, 1.0, -1.0), InvalidParameter);
}

TEST(ThermalQubit, StationaryStateIsGibbs) {
  const ModelSpec spec = thermal_qubit(1.0, 1.0, 1.0);
  const CMatrix ss = steady_state(spec);
  const double z = 1.0 + std::exp(-1.0);
  EXPECT_NEAR(ss(0, 0).real(), 1.0 / z, 1e-12);
  EXPECT_NEAR(ss(1, 1).real(), std::exp(-1.0) / z, 1e-12);
  EXPECT_LE(std::abs(ss(0, 1)), 1e-12);
}

// 2 ln(‖L_k‖_F / ‖L_{k*}‖_F) reproduces Δs_k for every channel.
void expect_norm_ratio_matches(const ModelSpec& spec) {
  for (const auto& ch : spec.channels) {
    const double ratio = ch.op.norm() / spec.channels[ch.pair].op.norm();
    EXPECT_NEAR(2.0 * std::log(ratio), ch.delta_s, 1e-10) << "channel " << ch.index;
  }
}

TEST(ModelProperties, NormRatioReproducesEntropyWeight) {
  expect_norm_ratio_matches(models::build_clock({}));
  models::ClockParams p;
  p.E1 = -3.7;
  p.beta = 0.4;
  expect_norm_ratio_matches(models::build_clock(p));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    expect_norm_ratio_matches(models::random_model(3, 2, seed, models::RandomFeedback::mixed));
  }
}

void expect_same_model(const ModelSpec& a, const ModelSpec& b) {
  ASSERT_EQ(a.dim, b.dim);
  EXPECT_LE(linalg::max_abs(a.hamiltonian - b.hamiltonian), 1e-12);
  EXPECT_LE(linalg::max_abs(a.initial_state - b.initial_state), 1e-12);
  ASSERT_EQ(a.channels.size(), b.channels.size());
  for (std::size_t k = 0; k < a.channels.size(); ++k) {
    EXPECT_EQ(a.channels[k].pair, b.channels[k].pair);
    EXPECT_NEAR(a.channels[k].delta_s, b.channels[k].delta_s, 1e-12);
    EXPECT_NEAR(a.channels[k].weight, b.channels[k].weight, 1e-12);
    EXPECT_LE(linalg::max_abs(a.channels[k].op - b.channels[k].op), 1e-12);
    const auto& fa = a.feedback_for(static_cast<int>(k));
    const auto& fb = b.feedback_for(static_cast<int>(k));
    EXPECT_EQ(fa.kind, fb.kind);
    ASSERT_EQ(fa.kraus.size(), fb.kraus.size());
    for (std::size_t i = 0; i < fa.kraus.size(); ++i) EXPECT_LE(linalg::max_abs(fa.kraus[i] - fb.kraus[i]), 1e-12);
  }
}

TEST(ModelFormat, RoundTripPreservesValidity) {
  std::vector<ModelSpec> specs{models::build_clock({}), thermal_qubit(0.7, 1.3, 2.0)};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    specs.push_back(models::random_model(2 + static_cast<int>(seed % 3), 2, seed, models::RandomFeedback::mixed));
  }
  for (const auto& spec : specs) {
    const ModelSpec back = io::model_from_json(io::model_to_json(spec));
    EXPECT_TRUE(validate(back).ok()) << validate(back).summary();
    expect_same_model(spec, back);
  }
}

TEST(ModelFormat, ReportsLocationOfBadInput) {
  EXPECT_THROW(io::model_from_json("{\"dim\": 2"), FormatError);
  try {
    io::model_from_json(R"({"dim": 2, "hamiltonian": [[[0,0],[0,0]],[[0,0]]]})");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("hamiltonian"), std::string::npos) << e.what();
  }
}

TEST(ModelFormat, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "fbtur_model_roundtrip.json";
  const ModelSpec spec = models::build_clock({});
  io::save_model(spec, path);
  expect_same_model(spec, io::load_model(path));
  std::filesystem::remove(path);
  EXPECT_THROW(io::load_model(path), FormatError);
}

TEST(Clock, CaptionParametersGiveExpectedRates) {
  const ModelSpec spec = models::build_clock({});
  EXPECT_TRUE(validate(spec).ok());
  ASSERT_EQ(spec.channels.size(), 6u);
  using namespace models::clock_channel;
  // γ_{0→1} = e^{−β E₁} γ_{1→0} = 10 at E₁ = 0.
  EXPECT_NEAR(std::norm(spec.channels[k0to1].op(1, 0)), 10.0, 1e-12);
  EXPECT_NEAR(std::norm(spec.channels[k1to2].op(2, 1)), 0.5 * std::exp(-1.0), 1e-12);
  EXPECT_NEAR(std::norm(spec.channels[k0to2].op(2, 0)), std::exp(-1.0), 1e-12);
  EXPECT_NEAR(spec.channels[k2to0].delta_s, 1.0, 1e-15);
  EXPECT_NEAR(spec.channels[k0to2].delta_s, -1.0, 1e-15);
  EXPECT_EQ(spec.channels[k2to0].weight, 1.0);
  EXPECT_EQ(spec.channels[k0to2].weight, -1.0);
  EXPECT_EQ(spec.channels[k1to0].weight, 0.0);
  EXPECT_EQ(spec.feedback_for(k0to1).kind, FeedbackKind::unitary);
  EXPECT_EQ(spec.feedback_for(k1to0).kind, FeedbackKind::unitary);
  EXPECT_EQ(spec.feedback_for(k2to1).kind, FeedbackKind::identity);
  EXPECT_LE(linalg::max_abs(spec.feedback_for(k0to1).kraus[0] - models::clock_swap(1, 2)), 0.0);
}

TEST(Clock, EntropyWeightConvention) {
  models::ClockParams p;
  p.E0 = 0.3;
  p.E1 = -1.2;
  p.E2 = 2.0;
  p.beta = 0.7;
  const ModelSpec spec = models::build_clock(p);
  using namespace models::clock_channel;
  EXPECT_NEAR(spec.channels[k1to0].delta_s, p.beta * (p.E1 - p.E0), 1e-14);
  EXPECT_NEAR(spec.channels[k2to1].delta_s, p.beta * (p.E2 - p.E1), 1e-14);
  EXPECT_TRUE(validate(spec).ok());
}

TEST(Clock, SwapUnitary) {
  const CMatrix u = models::clock_swap(0, 2);
  EXPECT_LE(linalg::max_abs(u * u.adjoint() - linalg::identity(3)), 0.0);
  EXPECT_EQ(u(0, 2), cplx(1.0));
  EXPECT_EQ(u(1, 1), cplx(1.0));
  EXPECT_THROW(models::clock_swap(1, 1), InvalidParameter);
}

TEST(Clock, FeedbackOffUsesIdentityMaps) {
  models::ClockParams p;
  p.feedback_on = false;
  const ModelSpec spec = models::build_clock(p);
  for (const auto& ch : spec.channels) EXPECT_EQ(spec.feedback_for(ch.index).kind, FeedbackKind::identity);
}

TEST(Clock, RejectsInvalidParameters) {
  models::ClockParams p;
  p.beta = 0.0;
  EXPECT_THROW(models::build_clock(p), InvalidParameter);
  p = {};
  p.gamma_2to1 = -1.0;
  EXPECT_THROW(models::build_clock(p), InvalidParameter);
}

TEST(RandomModel, AlwaysValid) {
  for (auto kind : {models::RandomFeedback::identity, models::RandomFeedback::unitary,
                    models::RandomFeedback::general_unital, models::RandomFeedback::mixed}) {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      const ModelSpec spec = models::random_model(2 + static_cast<int>(seed % 4), 1 + static_cast<int>(seed % 3),
                                                  seed, kind);
      const auto report = validate(spec);
      EXPECT_TRUE(report.ok()) << models::to_string(kind) << " seed " << seed << ": " << report.summary();
    }
  }
}

TEST(RandomModel, FeedbackKindIsHonoured) {
  const ModelSpec unitary = models::random_model(3, 2, 5, models::RandomFeedback::unitary);
  for (const auto& [k, fb] : unitary.feedback) EXPECT_EQ(fb.kind, FeedbackKind::unitary);
  const ModelSpec general = models::random_model(3, 2, 5, models::RandomFeedback::general_unital);
  for (const auto& [k, fb] : general.feedback) {
    EXPECT_EQ(fb.kind, FeedbackKind::general_unital);
    EXPECT_GE(fb.kraus.size(), 2u);
    EXPECT_LE(fb.kraus.size(), 3u);
  }
}

TEST(RandomModel, DeterministicInSeed) {
  const ModelSpec a = models::random_model(3, 2, 11, models::RandomFeedback::mixed);
  const ModelSpec b = models::random_model(3, 2, 11, models::RandomFeedback::mixed);
  expect_same_model(a, b);
  const ModelSpec c = models::random_model(3, 2, 12, models::RandomFeedback::mixed);
  EXPECT_GT(linalg::max_abs(a.hamiltonian - c.hamiltonian), 1e-3);
}

TEST(RandomModel, RejectsBadShape) {
  EXPECT_THROW(models::random_model(1, 1, 0, models::RandomFeedback::unitary), InvalidParameter);
  EXPECT_THROW(models::random_model(2, 0, 0, models::RandomFeedback::unitary), InvalidParameter);
}

}  // namespace
}  // namespace fbtur
