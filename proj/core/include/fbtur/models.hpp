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
#include <string_view>

#include "fbtur/model.hpp"

namespace fbtur::models {

/// Three-level clock. Defaults reproduce the reference parameter set with E1 = 0.
struct ClockParams {
  double E0 = 0.0;
  double E1 = 0.0;
  double E2 = 1.0;
  double beta = 1.0;
  double gamma_1to0 = 10.0;
  double gamma_2to1 = 0.5;
  double gamma_2to0 = 1.0;
  bool feedback_on = true;

  bool operator==(const ClockParams&) const = default;
};

/// Channel layout of the clock model.
namespace clock_channel {
inline constexpr int k1to0 = 0;
inline constexpr int k0to1 = 1;
inline constexpr int k2to1 = 2;
inline constexpr int k1to2 = 3;
inline constexpr int k2to0 = 4;
inline constexpr int k0to2 = 5;
}  // namespace clock_channel

/// Jumps L_{i→j} = √γ_{i→j}|j⟩⟨i| with γ_{i→j} = e^{−β(E_j−E_i)}γ_{j→i} and Δs_{i→j} = β(E_i − E_j).
/// Feedback swaps 1↔2 after 0→1 and 0↔2 after 1→0; the current counts 2→0 minus 0→2.
/// The initial state is 𝟙/3.
ModelSpec build_clock(const ClockParams& p);

/// Permutation unitary |i⟩⟨j| + |j⟩⟨i| + |3−i−j⟩⟨3−i−j| on three levels.
CMatrix clock_swap(int i, int j);

enum class RandomFeedback { identity, unitary, general_unital, mixed };

struct RandomModelOptions {
  int dim = 2;
  int n_pairs = 1;
  std::uint64_t seed = 0;
  RandomFeedback feedback = RandomFeedback::unitary;
  double delta_s_range = 2.0;  // Δs drawn uniformly from [−range, range]

  bool operator==(const RandomModelOptions&) const = default;
};

/// Random model satisfying every validation invariant by construction.
ModelSpec random_model(const RandomModelOptions& opts);
ModelSpec random_model(int dim, int n_pairs, std::uint64_t seed, RandomFeedback feedback);

std::string_view to_string(RandomFeedback f);
RandomFeedback random_feedback_from_string(std::string_view name);

}  // namespace fbtur::models
