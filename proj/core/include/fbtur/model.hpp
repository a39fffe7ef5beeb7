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

#include <map>
#include <string>
#include <vector>

#include "fbtur/linalg.hpp"

namespace fbtur {

/// One monitored jump channel. Channels come in pairs (k, k*) tied by local
/// detailed balance L_k = exp(Δs_k / 2) L_{k*}†. `index` is the channel's
/// position in ModelSpec::channels and `pair` the position of its partner.
struct JumpChannel {
  int index = 0;
  CMatrix op;
  double delta_s = 0.0;  // environmental entropy change of the jump (k_B = 1)
  int pair = 0;
  double weight = 0.0;   // counting coefficient c_k
};

enum class FeedbackKind { identity, unitary, general_unital };

/// CPTP map F[X] = Σ_α K^α X K^α† applied right after a detected jump.
/// Only unital maps are admitted.
struct FeedbackChannel {
  std::vector<CMatrix> kraus;
  FeedbackKind kind = FeedbackKind::identity;

  static FeedbackChannel identity_map(Eigen::Index dim);
  static FeedbackChannel unitary(const CMatrix& u);
  static FeedbackChannel mixture(std::vector<CMatrix> kraus);

  CMatrix apply(const CMatrix& x) const;
};

struct ModelSpec {
  Eigen::Index dim = 0;
  CMatrix hamiltonian;
  std::vector<JumpChannel> channels;
  std::map<int, FeedbackChannel> feedback;  // channel index -> feedback map
  CMatrix initial_state;

  /// Feedback map of channel k. Throws InvalidModel when missing.
  const FeedbackChannel& feedback_for(int k) const;
};

struct Violation {
  std::string invariant;
  double residual = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(std::string_view invariant) const;
  const Violation* find(std::string_view invariant) const;
  std::string summary() const;
};

namespace tolerance {
inline constexpr double kOperator = 1e-10;   // Hermiticity, LDB, Kraus identities
inline constexpr double kScalar = 1e-12;     // Δs / counting antisymmetry, trace of ρ₀
inline constexpr double kStatePositivity = 1e-10;
}  // namespace tolerance

/// Checks every ModelSpec invariant. Violations are returned as data; this
/// never throws.
ValidationReport validate(const ModelSpec& spec);

/// Throws InvalidModel carrying the report summary if `spec` is not valid.
void require_valid(const ModelSpec& spec);

std::string_view to_string(FeedbackKind kind);
FeedbackKind feedback_kind_from_string(std::string_view name);

/// Two-level system in contact with one bath, no feedback:
/// L_↓ = √γ↓ |0⟩⟨1|, L_↑ = √(γ↓ e^{-β gap}) |1⟩⟨0|, Δs_↓ = β gap,
/// counting weights +1 (↓) and -1 (↑). Channel 0 is ↓, channel 1 is ↑. The
/// initial state is the Gibbs state.
ModelSpec thermal_qubit(double beta, double energy_gap, double gamma_down);

/// Gibbs state exp(-βH)/Z of a Hermitian H.
CMatrix gibbs_state(const CMatrix& hamiltonian, double beta);

}  // namespace fbtur
