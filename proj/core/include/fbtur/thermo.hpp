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

#include <vector>

#include "fbtur/linalg.hpp"
#include "fbtur/model.hpp"

namespace fbtur::superop {
struct GeneratorSet;
}

namespace fbtur::thermo {

/// Probabilities, traces or log arguments below this floor make the matching
/// σ / a / ℓ term contribute zero.
inline constexpr double kNegligible = 1e-15;
/// Channels whose jump rate tr(L ρ L†) falls below this contribute nothing
/// to the mutual-information rate.
inline constexpr double kNegligibleJumpRate = 1e-14;

/// −Σ λ ln λ over a spectrum; zero and tiny negative eigenvalues contribute 0.
/// Throws NegativeEigenvalue for eigenvalues below −1e-8.
double entropy_of_spectrum(const RVector& eigenvalues);

/// S(ρ) = −tr ρ ln ρ.
double von_neumann_entropy(const CMatrix& rho);

/// D(ρ‖φ) = tr ρ (ln ρ − ln φ), with φ's spectrum clipped at `clip`.
double relative_entropy(const CMatrix& rho, const CMatrix& phi, double clip = linalg::kDefaultLogClip);

/// tr(L_k ρ L_k†) for every channel.
std::vector<double> jump_rates(const ModelSpec& spec, const CMatrix& rho);

/// ℓ_k = (r_k − r_{k*}) / (r_k + r_{k*}) with r_k = tr(L_k ρ L_k†); zero
/// when the denominator is below kNegligible.
std::vector<double> ell(const ModelSpec& spec, const CMatrix& rho);
std::vector<double> ell_from_rates(const ModelSpec& spec, const std::vector<double>& rates);

/// İ = Σ_k r_k {D(F_k[ρ'_k]‖ρ) − D(ρ'_k‖ρ)}, ρ'_k = L_k ρ L_k† / r_k.
double mi_rate(const ModelSpec& spec, const CMatrix& rho);

/// One (k, m, n) entry of the spectral entropy-production table, with
/// forward = w_k^{mn} p_n and backward = w_{k*}^{nm} p_m in the eigenbasis of ρ.
struct SigmaTerm {
  int k = 0;
  int m = 0;
  int n = 0;
  double forward = 0.0;
  double backward = 0.0;
  double sigma = 0.0;     // (forward − backward) ln(forward / backward)
  double activity = 0.0;  // forward + backward
};

struct SigmaTable {
  double sigma = 0.0;     // ½ Σ σ_k^{mn}
  double activity = 0.0;  // ½ Σ a_k^{mn}
  std::vector<SigmaTerm> terms;
};

/// Entropy production of the measurement step, σ = −tr(L⁽⁰⁾[ρ] ln ρ) +
/// Σ_k Δs_k r_k, evaluated through the spectral table.
SigmaTable sigma_rate(const ModelSpec& spec, const CMatrix& rho);
SigmaTable sigma_rate(const ModelSpec& spec, const linalg::HermitianEig& eig);

/// Ṡ^sys = −tr(L^(fb)[ρ] ln ρ).
double system_entropy_rate(const ModelSpec& spec, const CMatrix& rho);

/// Inverse of z ↦ z tanh z on [0, ∞).
double phi_fn(double x);
/// x² Φ(x)⁻², continuous at 0.
double phi_ratio_sq(double x);

/// Every pointwise rate at one instant.
struct RateBundle {
  double s_env_rate = 0.0;
  double s_sys_rate = 0.0;
  double activity_rate = 0.0;
  double mi_rate = 0.0;
  double sigma_rate = 0.0;
  double sigma_dot = 0.0;  // Ṡ^sys + Ṡ^env − İ
  double fisher_rate = 0.0;
  double j_rate = 0.0;
  double j_phi_rate = 0.0;
  std::vector<double> ell;
};

/// Evaluates all rates for ρ (given through its decomposition; eigenvalues
/// are clipped at zero) and the auxiliary operator φ.
RateBundle evaluate_rates(const ModelSpec& spec, const superop::GeneratorSet& gens,
                          const linalg::HermitianEig& rho_eig, const CMatrix& phi);
RateBundle evaluate_rates(const ModelSpec& spec, const superop::GeneratorSet& gens, const CMatrix& rho,
                          const CMatrix& phi);

/// Entropy production of one discrete measurement step of length dt, as
/// derived here (`ours` = S(ρ⁻) − S(ρ) + dS^env) and in the earlier
/// formulation that adds the record's Shannon entropy minus the
/// measurement mutual information (`prior` = ours + H(p) − I⁻).
struct SecondLawComparison {
  double ours = 0.0;
  double prior = 0.0;
};

SecondLawComparison second_law_comparison(const ModelSpec& spec, const CMatrix& rho, double dt = 1e-6);

}  // namespace fbtur::thermo
