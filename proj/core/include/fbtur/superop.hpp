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

#include <utility>
#include <vector>

#include "fbtur/linalg.hpp"
#include "fbtur/model.hpp"

namespace fbtur::superop {

enum class GeneratorKind { feedback, bare, moment_drive_1, moment_drive_2, phi_drive };

/// Superoperator acting on row-stacked vectorized operators (dim² × dim²).
struct VectorizedGenerator {
  CMatrix matrix;
  Eigen::Index dim = 0;
  GeneratorKind kind = GeneratorKind::feedback;

  CMatrix apply(const CMatrix& x) const;
};

/// Superoperator of X ↦ A X B, i.e. A ⊗ Bᵀ.
CMatrix sandwich(const CMatrix& left, const CMatrix& right);

/// −i[H,·] + Σ_k (F_k[L_k · L_k†] − ½{L_k†L_k, ·}).
VectorizedGenerator build_feedback_liouvillian(const ModelSpec& spec);
/// The same with every F_k replaced by the identity (plain GKSL generator).
VectorizedGenerator build_bare_liouvillian(const ModelSpec& spec);

/// First and second counting-field derivatives of the tilted generator at
/// u = 0: D₁ = Σ_k c_k F_k[L_k · L_k†], D₂ = Σ_k c_k² F_k[L_k · L_k†].
std::pair<VectorizedGenerator, VectorizedGenerator> build_moment_drives(const ModelSpec& spec);

/// Σ_k ℓ_k(ρ) (F_k[L_k ρ L_k†] − ½{L_k†L_k, ρ}); traceless for any ρ.
CMatrix build_phi_drive(const ModelSpec& spec, const CMatrix& rho);

/// max_j |Σ_i G(ii', j)|: how far ⟨⟨𝟙| G is from zero.
double trace_residual(const CMatrix& generator, Eigen::Index dim);

/// Everything the integrator needs for one model, built once.
struct GeneratorSet {
  Eigen::Index dim = 0;
  VectorizedGenerator feedback;
  VectorizedGenerator bare;
  VectorizedGenerator drive1;
  VectorizedGenerator drive2;
  /// Per channel: vectorized F_k[L_k · L_k†] − ½{L_k†L_k, ·}.
  std::vector<CMatrix> channel_terms;
  /// Largest |eigenvalue| of the feedback generator.
  double spectral_radius = 0.0;
};

GeneratorSet build_generators(const ModelSpec& spec);

}  // namespace fbtur::superop
