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

#include "fbtur/superop.hpp"

#include <string>

#include "fbtur/errors.hpp"
#include "fbtur/thermo.hpp"

namespace fbtur::superop {

namespace {

void check_dims(const ModelSpec& spec) {
  const Eigen::Index d = spec.dim;
  auto bad = [d](const CMatrix& m) { return m.rows() != d || m.cols() != d; };
  if (d <= 0 || bad(spec.hamiltonian)) throw DimensionMismatch("hamiltonian does not match model dimension");
  for (const auto& ch : spec.channels) {
    if (bad(ch.op)) {
      throw DimensionMismatch("jump operator " + std::to_string(ch.index) +
                              " does not match model dimension");
    }
  }
}

// Vectorized X ↦ F_k[L X L†] = Σ_α (K^α L) X (K^α L)†.
CMatrix jump_term(const JumpChannel& ch, const FeedbackChannel& fb) {
  if (fb.kind == FeedbackKind::identity) return sandwich(ch.op, ch.op.adjoint());
  const Eigen::Index d = ch.op.rows();
  CMatrix out = CMatrix::Zero(d * d, d * d);
  for (const auto& k : fb.kraus) {
    const CMatrix kl = k * ch.op;
    out += sandwich(kl, kl.adjoint());
  }
  return out;
}

// Vectorized X ↦ −½{L†L, X}.
CMatrix anticommutator_term(const JumpChannel& ch) {
  const Eigen::Index d = ch.op.rows();
  const CMatrix ldl = ch.op.adjoint() * ch.op;
  const CMatrix eye = linalg::identity(d);
  return -0.5 * (sandwich(ldl, eye) + sandwich(eye, ldl));
}

CMatrix hamiltonian_term(const CMatrix& h) {
  const CMatrix eye = linalg::identity(h.rows());
  return cplx(0.0, -1.0) * (sandwich(h, eye) - sandwich(eye, h));
}

VectorizedGenerator build_liouvillian(const ModelSpec& spec, bool with_feedback) {
  check_dims(spec);
  const Eigen::Index d = spec.dim;
  CMatrix g = hamiltonian_term(spec.hamiltonian);
  const FeedbackChannel none = FeedbackChannel::identity_map(d);
  for (const auto& ch : spec.channels) {
    const FeedbackChannel& fb = with_feedback ? spec.feedback_for(ch.index) : none;
    g += jump_term(ch, fb) + anticommutator_term(ch);
  }
  return {std::move(g), d, with_feedback ? GeneratorKind::feedback : GeneratorKind::bare};
}

}  // namespace

CMatrix VectorizedGenerator::apply(const CMatrix& x) const {
  if (x.rows() != dim || x.cols() != dim) throw DimensionMismatch("operator does not match generator");
  return linalg::unvec(matrix * linalg::vec(x), dim);
}

CMatrix sandwich(const CMatrix& left, const CMatrix& right) {
  return linalg::kron(left, right.transpose());
}

VectorizedGenerator build_feedback_liouvillian(const ModelSpec& spec) { return build_liouvillian(spec, true); }

VectorizedGenerator build_bare_liouvillian(const ModelSpec& spec) { return build_liouvillian(spec, false); }

std::pair<VectorizedGenerator, VectorizedGenerator> build_moment_drives(const ModelSpec& spec) {
  check_dims(spec);
  const Eigen::Index d = spec.dim;
  CMatrix d1 = CMatrix::Zero(d * d, d * d);
  CMatrix d2 = CMatrix::Zero(d * d, d * d);
  for (const auto& ch : spec.channels) {
    if (ch.weight == 0.0) continue;
    const CMatrix j = jump_term(ch, spec.feedback_for(ch.index));
    d1 += ch.weight * j;
    d2 += (ch.weight * ch.weight) * j;
  }
  return {{std::move(d1), d, GeneratorKind::moment_drive_1}, {std::move(d2), d, GeneratorKind::moment_drive_2}};
}

CMatrix build_phi_drive(const ModelSpec& spec, const CMatrix& rho) {
  check_dims(spec);
  if (rho.rows() != spec.dim || rho.cols() != spec.dim) throw DimensionMismatch("state does not match model");
  const std::vector<double> ell = thermo::ell(spec, rho);
  CMatrix out = CMatrix::Zero(spec.dim, spec.dim);
  for (const auto& ch : spec.channels) {
    const double l = ell[ch.index];
    if (l == 0.0) continue;
    const CMatrix ldl = ch.op.adjoint() * ch.op;
    const CMatrix jumped = spec.feedback_for(ch.index).apply(ch.op * rho * ch.op.adjoint());
    out += l * (jumped - 0.5 * (ldl * rho + rho * ldl));
  }
  return out;
}

double trace_residual(const CMatrix& generator, Eigen::Index dim) {
  // ⟨⟨𝟙| picks the rows i*dim + i.
  Eigen::RowVectorXcd acc = Eigen::RowVectorXcd::Zero(generator.cols());
  for (Eigen::Index i = 0; i < dim; ++i) acc += generator.row(i * dim + i);
  return acc.size() ? acc.cwiseAbs().maxCoeff() : 0.0;
}

GeneratorSet build_generators(const ModelSpec& spec) {
  GeneratorSet set;
  set.dim = spec.dim;
  set.feedback = build_feedback_liouvillian(spec);
  set.bare = build_bare_liouvillian(spec);
  auto [d1, d2] = build_moment_drives(spec);
  set.drive1 = std::move(d1);
  set.drive2 = std::move(d2);
  set.channel_terms.reserve(spec.channels.size());
  for (const auto& ch : spec.channels) {
    set.channel_terms.push_back(jump_term(ch, spec.feedback_for(ch.index)) + anticommutator_term(ch));
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(Eigen::MatrixXcd(set.feedback.matrix), false);
  if (solver.info() == Eigen::Success) set.spectral_radius = solver.eigenvalues().cwiseAbs().maxCoeff();
  return set;
}

}  // namespace fbtur::superop
