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

#include "fbtur/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fbtur/errors.hpp"
#include "fbtur/superop.hpp"

namespace fbtur::thermo {

namespace {

// tr(A B) for square matrices, real part.
double trace_product(const CMatrix& a, const CMatrix& b) {
  return (a.cwiseProduct(b.transpose())).sum().real();
}

double real_trace(const CMatrix& a) { return a.trace().real(); }

linalg::HermitianEig clipped(linalg::HermitianEig eig) {
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
    if (eig.eigenvalues(i) < -linalg::kNegativeEigenvalueTolerance) {
      throw NegativeEigenvalue("state has eigenvalue " + std::to_string(eig.eigenvalues(i)));
    }
    eig.eigenvalues(i) = std::max(eig.eigenvalues(i), 0.0);
  }
  return eig;
}

// −S(X) for a PSD X of unit trace, via eigenvalues only.
double neg_entropy(const CMatrix& x) { return -entropy_of_spectrum(linalg::herm_eigenvalues(x)); }

// tr(L^(fb)[ρ] ln ρ) without vectorization.
CMatrix feedback_generator_applied(const ModelSpec& spec, const CMatrix& rho) {
  const cplx minus_i(0.0, -1.0);
  CMatrix out = minus_i * (spec.hamiltonian * rho - rho * spec.hamiltonian);
  for (const auto& ch : spec.channels) {
    const CMatrix ldl = ch.op.adjoint() * ch.op;
    out += spec.feedback_for(ch.index).apply(ch.op * rho * ch.op.adjoint());
    out -= 0.5 * (ldl * rho + rho * ldl);
  }
  return out;
}

double mi_rate_impl(const ModelSpec& spec, const CMatrix& rho, const CMatrix& log_rho,
                    const std::vector<double>& rates) {
  double total = 0.0;
  for (const auto& ch : spec.channels) {
    const FeedbackChannel& fb = spec.feedback_for(ch.index);
    if (fb.kind == FeedbackKind::identity) continue;
    const double r = rates[ch.index];
    if (r < kNegligibleJumpRate) continue;
    const CMatrix post_jump = ch.op * rho * ch.op.adjoint() / r;
    const CMatrix post_feedback = fb.apply(post_jump);
    double term = -trace_product(post_feedback, log_rho) + trace_product(post_jump, log_rho);
    if (fb.kind != FeedbackKind::unitary) {
      // Unitary feedback leaves the spectrum unchanged, so the entropies cancel.
      term += neg_entropy(linalg::hermitian_part(post_feedback)) - neg_entropy(linalg::hermitian_part(post_jump));
    }
    total += r * term;
  }
  return total;
}

}  // namespace

double entropy_of_spectrum(const RVector& eigenvalues) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    const double p = eigenvalues(i);
    if (p < -linalg::kNegativeEigenvalueTolerance) {
      throw NegativeEigenvalue("entropy: eigenvalue " + std::to_string(p));
    }
    if (p > 0.0) s -= p * std::log(p);
  }
  return s;
}

double von_neumann_entropy(const CMatrix& rho) { return entropy_of_spectrum(linalg::herm_eigenvalues(rho)); }

double relative_entropy(const CMatrix& rho, const CMatrix& phi, double clip) {
  const CMatrix log_phi = linalg::safe_log_psd(phi, clip);
  return -von_neumann_entropy(rho) - trace_product(linalg::hermitian_part(rho), log_phi);
}

std::vector<double> jump_rates(const ModelSpec& spec, const CMatrix& rho) {
  std::vector<double> rates(spec.channels.size());
  for (const auto& ch : spec.channels) rates[ch.index] = real_trace(ch.op * rho * ch.op.adjoint());
  return rates;
}

std::vector<double> ell_from_rates(const ModelSpec& spec, const std::vector<double>& rates) {
  std::vector<double> out(spec.channels.size(), 0.0);
  for (const auto& ch : spec.channels) {
    const double fwd = rates[ch.index];
    const double bwd = rates[ch.pair];
    const double den = fwd + bwd;
    if (den < kNegligible) continue;
    out[ch.index] = std::clamp((fwd - bwd) / den, -1.0, 1.0);
  }
  return out;
}

std::vector<double> ell(const ModelSpec& spec, const CMatrix& rho) {
  return ell_from_rates(spec, jump_rates(spec, rho));
}

double mi_rate(const ModelSpec& spec, const CMatrix& rho) {
  const auto eig = clipped(linalg::herm_eig(rho));
  const CMatrix log_rho = linalg::safe_log_psd(eig);
  return mi_rate_impl(spec, linalg::hermitian_part(rho), log_rho, jump_rates(spec, rho));
}

SigmaTable sigma_rate(const ModelSpec& spec, const linalg::HermitianEig& raw_eig) {
  const auto eig = clipped(raw_eig);
  const Eigen::Index d = eig.eigenvalues.size();
  RVector p(d);
  for (Eigen::Index i = 0; i < d; ++i) p(i) = std::max(eig.eigenvalues(i), linalg::kDefaultLogClip);

  const CMatrix& v = eig.eigenvectors;
  std::vector<Eigen::MatrixXd> w;  // w[k](m, n) = |⟨m|L_k|n⟩|²
  w.reserve(spec.channels.size());
  for (const auto& ch : spec.channels) w.emplace_back((v.adjoint() * ch.op * v).cwiseAbs2());

  SigmaTable table;
  table.terms.reserve(spec.channels.size() * d * d);
  constexpr double kFloor = std::numeric_limits<double>::min();
  for (const auto& ch : spec.channels) {
    const Eigen::MatrixXd& wk = w[ch.index];
    const Eigen::MatrixXd& wr = w[ch.pair];
    for (Eigen::Index m = 0; m < d; ++m) {
      for (Eigen::Index n = 0; n < d; ++n) {
        SigmaTerm t;
        t.k = ch.index;
        t.m = static_cast<int>(m);
        t.n = static_cast<int>(n);
        t.forward = wk(m, n) * p(n);
        t.backward = wr(n, m) * p(m);
        t.activity = t.forward + t.backward;
        if (std::max(t.forward, t.backward) >= kNegligible) {
          t.sigma = (t.forward - t.backward) *
                    std::log(std::max(t.forward, kFloor) / std::max(t.backward, kFloor));
        }
        table.sigma += 0.5 * t.sigma;
        table.activity += 0.5 * t.activity;
        table.terms.push_back(t);
      }
    }
  }
  return table;
}

SigmaTable sigma_rate(const ModelSpec& spec, const CMatrix& rho) { return sigma_rate(spec, linalg::herm_eig(rho)); }

double system_entropy_rate(const ModelSpec& spec, const CMatrix& rho) {
  const auto eig = clipped(linalg::herm_eig(rho));
  const CMatrix log_rho = linalg::safe_log_psd(eig);
  return -trace_product(feedback_generator_applied(spec, linalg::hermitian_part(rho)), log_rho);
}

double phi_fn(double x) {
  if (!(x >= 0.0)) throw InvalidParameter("phi_fn: argument must be nonnegative");
  if (x == 0.0) return 0.0;
  if (!std::isfinite(x)) return x;
  // z tanh z = x has z ≈ x + 2x e^{-2x} once tanh saturates.
  if (x > 30.0) return x + 2.0 * x * std::exp(-2.0 * x);

  auto f = [x](double z) { return z * std::tanh(z) - x; };
  double lo = std::max(std::sqrt(x), x);  // f(lo) <= 0
  double hi = x + 1.0;                    // f(hi) >= 0
  double z = lo;
  for (int iter = 0; iter < 200; ++iter) {
    const double fz = f(z);
    if (fz == 0.0) return z;
    if (fz < 0.0) lo = z; else hi = z;
    const double t = std::tanh(z);
    const double deriv = t + z * (1.0 - t * t);
    double next = z - fz / deriv;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - z) <= 4.0 * std::numeric_limits<double>::epsilon() * next) return next;
    z = next;
  }
  return z;
}

double phi_ratio_sq(double x) {
  if (x == 0.0) return 0.0;
  // x / Φ(x) = tanh Φ(x).
  const double t = std::tanh(phi_fn(x));
  return t * t;
}

RateBundle evaluate_rates(const ModelSpec& spec, const superop::GeneratorSet& gens,
                          const linalg::HermitianEig& raw_eig, const CMatrix& phi) {
  const auto eig = clipped(raw_eig);
  const CMatrix rho = linalg::reconstruct(eig);
  const CMatrix log_rho = linalg::safe_log_psd(eig);

  RateBundle out;
  std::vector<double> rates(spec.channels.size());
  for (const auto& ch : spec.channels) {
    const double r = real_trace(ch.op * rho * ch.op.adjoint());
    rates[ch.index] = r;
    out.activity_rate += r;
    out.s_env_rate += ch.delta_s * r;
    out.j_rate += ch.weight * r;
    if (ch.weight != 0.0) out.j_phi_rate += ch.weight * real_trace(ch.op * phi * ch.op.adjoint());
  }
  out.ell = ell_from_rates(spec, rates);
  for (const auto& ch : spec.channels) {
    out.fisher_rate += out.ell[ch.index] * out.ell[ch.index] * rates[ch.index];
  }
  out.mi_rate = mi_rate_impl(spec, rho, log_rho, rates);
  out.sigma_rate = sigma_rate(spec, eig).sigma;
  const CMatrix generated = linalg::unvec(gens.feedback.matrix * linalg::vec(rho), gens.dim);
  out.s_sys_rate = -trace_product(generated, log_rho);
  out.sigma_dot = out.s_sys_rate + out.s_env_rate - out.mi_rate;
  return out;
}

RateBundle evaluate_rates(const ModelSpec& spec, const superop::GeneratorSet& gens, const CMatrix& rho,
                          const CMatrix& phi) {
  return evaluate_rates(spec, gens, linalg::herm_eig(rho), phi);
}

SecondLawComparison second_law_comparison(const ModelSpec& spec, const CMatrix& rho_in, double dt) {
  if (!(dt > 0.0)) throw InvalidParameter("second_law_comparison: dt must be positive");
  const Eigen::Index d = spec.dim;
  const CMatrix rho = linalg::hermitian_part(rho_in);
  const cplx i_unit(0.0, 1.0);

  CMatrix h_eff = spec.hamiltonian;
  for (const auto& ch : spec.channels) h_eff -= 0.5 * i_unit * (ch.op.adjoint() * ch.op);
  const CMatrix m0 = linalg::identity(d) - i_unit * dt * h_eff;

  // Unnormalized post-measurement blocks M_k ρ M_k†, k = 0 first.
  std::vector<CMatrix> blocks;
  blocks.reserve(spec.channels.size() + 1);
  blocks.push_back(m0 * rho * m0.adjoint());
  double env = 0.0;
  for (const auto& ch : spec.channels) {
    blocks.push_back(dt * (ch.op * rho * ch.op.adjoint()));
    env += ch.delta_s * real_trace(blocks.back());
  }

  double total = 0.0;
  for (const auto& b : blocks) total += real_trace(b);
  CMatrix rho_minus = CMatrix::Zero(d, d);
  double shannon = 0.0;
  double conditional = 0.0;  // Σ p_k S(ρ⁻_k)
  for (const auto& b : blocks) {
    const double q = real_trace(b);
    if (q <= 0.0) continue;
    const double p = q / total;
    rho_minus += b / total;
    shannon -= p * std::log(p);
    conditional += p * von_neumann_entropy(linalg::hermitian_part(b / q));
  }
  rho_minus = linalg::hermitian_part(rho_minus);

  const double s_before = von_neumann_entropy(rho);
  const double s_after = von_neumann_entropy(rho_minus);
  const double mutual_minus = s_after - conditional;

  SecondLawComparison out;
  out.ours = s_after - s_before + env;
  out.prior = out.ours + shannon - mutual_minus;
  return out;
}

}  // namespace fbtur::thermo
