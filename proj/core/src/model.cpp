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

#include "fbtur/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fbtur/errors.hpp"

namespace fbtur {

namespace {

void add(ValidationReport& report, std::string invariant, double residual, std::string detail) {
  report.violations.push_back({std::move(invariant), residual, std::move(detail)});
}

std::string channel_label(int k) { return "channel " + std::to_string(k); }

bool square_of(const CMatrix& m, Eigen::Index dim) { return m.rows() == dim && m.cols() == dim; }

void validate_feedback(ValidationReport& report, int k, const FeedbackChannel& fb, Eigen::Index dim) {
  const std::string label = "feedback of " + channel_label(k);
  if (fb.kraus.empty()) {
    add(report, "feedback kraus list", 1.0, label + " has no Kraus operators");
    return;
  }
  for (const auto& kop : fb.kraus) {
    if (!square_of(kop, dim)) {
      add(report, "dimension", 1.0, label + " has a Kraus operator of the wrong size");
      return;
    }
    if (!linalg::is_finite(kop)) {
      add(report, "finite entries", 1.0, label + " has non-finite entries");
      return;
    }
  }
  CMatrix tp = CMatrix::Zero(dim, dim);
  CMatrix unital = CMatrix::Zero(dim, dim);
  for (const auto& kop : fb.kraus) {
    tp += kop.adjoint() * kop;
    unital += kop * kop.adjoint();
  }
  const CMatrix eye = linalg::identity(dim);
  const double tp_res = linalg::max_abs(tp - eye);
  if (tp_res > tolerance::kOperator) add(report, "trace-preserving", tp_res, label);
  const double unital_res = linalg::max_abs(unital - eye);
  if (unital_res > tolerance::kOperator) add(report, "unital", unital_res, label);

  switch (fb.kind) {
    case FeedbackKind::identity: {
      double res = fb.kraus.size() == 1 ? linalg::max_abs(fb.kraus.front() - eye) : 1.0;
      if (res > tolerance::kOperator) add(report, "identity feedback", res, label);
      break;
    }
    case FeedbackKind::unitary: {
      if (fb.kraus.size() != 1) {
        add(report, "unitary feedback", static_cast<double>(fb.kraus.size()),
            label + " declared unitary but has several Kraus operators");
        break;
      }
      const CMatrix& u = fb.kraus.front();
      const double res = linalg::max_abs(u.adjoint() * u - eye);
      if (res > tolerance::kOperator) add(report, "unitary feedback", res, label);
      break;
    }
    case FeedbackKind::general_unital:
      break;
  }
}

}  // namespace

FeedbackChannel FeedbackChannel::identity_map(Eigen::Index dim) {
  return {{linalg::identity(dim)}, FeedbackKind::identity};
}

FeedbackChannel FeedbackChannel::unitary(const CMatrix& u) { return {{u}, FeedbackKind::unitary}; }

FeedbackChannel FeedbackChannel::mixture(std::vector<CMatrix> kraus) {
  return {std::move(kraus), FeedbackKind::general_unital};
}

CMatrix FeedbackChannel::apply(const CMatrix& x) const {
  if (kind == FeedbackKind::identity) return x;
  CMatrix out = CMatrix::Zero(x.rows(), x.cols());
  for (const auto& k : kraus) out.noalias() += k * x * k.adjoint();
  return out;
}

const FeedbackChannel& ModelSpec::feedback_for(int k) const {
  auto it = feedback.find(k);
  if (it == feedback.end()) throw InvalidModel("no feedback entry for " + channel_label(k));
  return it->second;
}

bool ValidationReport::has(std::string_view invariant) const { return find(invariant) != nullptr; }

const Violation* ValidationReport::find(std::string_view invariant) const {
  auto it = std::find_if(violations.begin(), violations.end(),
                         [&](const Violation& v) { return v.invariant == invariant; });
  return it == violations.end() ? nullptr : &*it;
}

std::string ValidationReport::summary() const {
  if (ok()) return "valid";
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    const auto& v = violations[i];
    if (i) os << "; ";
    os << v.invariant << " (residual " << v.residual << ")";
    if (!v.detail.empty()) os << ": " << v.detail;
  }
  return os.str();
}

ValidationReport validate(const ModelSpec& spec) {
  ValidationReport report;
  const Eigen::Index dim = spec.dim;
  if (dim <= 0) {
    add(report, "dimension", static_cast<double>(dim), "dimension must be positive");
    return report;
  }

  if (!square_of(spec.hamiltonian, dim)) {
    add(report, "dimension", 1.0, "hamiltonian has the wrong size");
  } else if (!linalg::is_finite(spec.hamiltonian)) {
    add(report, "finite entries", 1.0, "hamiltonian");
  } else {
    const double res = linalg::hermitian_residual(spec.hamiltonian);
    if (res > tolerance::kOperator) add(report, "hamiltonian hermitian", res, "");
  }

  if (!square_of(spec.initial_state, dim)) {
    add(report, "dimension", 1.0, "initial state has the wrong size");
  } else if (!linalg::is_finite(spec.initial_state)) {
    add(report, "finite entries", 1.0, "initial state");
  } else {
    const CMatrix& rho = spec.initial_state;
    const double herm = linalg::hermitian_residual(rho);
    if (herm > tolerance::kOperator) add(report, "initial state hermitian", herm, "");
    const double tr_res = std::abs(rho.trace() - cplx(1.0));
    if (tr_res > tolerance::kScalar) add(report, "initial state trace", tr_res, "");
    if (herm <= linalg::kHermitianTolerance) {
      const double min_eig = linalg::herm_eigenvalues(rho).minCoeff();
      if (min_eig < -tolerance::kStatePositivity) {
        add(report, "initial state positive", -min_eig, "");
      }
    }
  }

  const int n = static_cast<int>(spec.channels.size());
  if (n == 0) add(report, "jump channels", 0.0, "model has no jump channels");

  std::vector<bool> shape_ok(spec.channels.size(), false);
  for (int pos = 0; pos < n; ++pos) {
    const JumpChannel& ch = spec.channels[pos];
    const std::string label = channel_label(pos);
    if (ch.index != pos) {
      add(report, "channel index", std::abs(ch.index - pos),
          label + " declares index " + std::to_string(ch.index));
    }
    if (!square_of(ch.op, dim)) {
      add(report, "dimension", 1.0, label + " jump operator has the wrong size");
      continue;
    }
    if (!linalg::is_finite(ch.op)) {
      add(report, "finite entries", 1.0, label);
      continue;
    }
    if (linalg::max_abs(ch.op) == 0.0) {
      add(report, "nonzero jump operator", 0.0, label + " is identically zero");
      continue;
    }
    shape_ok[pos] = true;
  }

  for (int pos = 0; pos < n; ++pos) {
    const JumpChannel& ch = spec.channels[pos];
    const std::string label = channel_label(pos);
    if (ch.pair < 0 || ch.pair >= n) {
      add(report, "pairing", 1.0, label + " pairs with missing channel " + std::to_string(ch.pair));
      continue;
    }
    const JumpChannel& partner = spec.channels[ch.pair];
    if (partner.pair != pos) {
      add(report, "pairing involution", 1.0,
          label + " -> " + std::to_string(ch.pair) + " -> " + std::to_string(partner.pair));
      continue;
    }
    const double ds_res = std::abs(ch.delta_s + partner.delta_s);
    if (ds_res > tolerance::kScalar) add(report, "entropy antisymmetry", ds_res, label);
    const double c_res = std::abs(ch.weight + partner.weight);
    if (c_res > tolerance::kScalar) add(report, "counting antisymmetry", c_res, label);
    if (!std::isfinite(ch.delta_s) || !std::isfinite(ch.weight)) {
      add(report, "finite entries", 1.0, label + " scalar fields");
      continue;
    }
    if (shape_ok[pos] && shape_ok[ch.pair]) {
      const CMatrix expected = std::exp(0.5 * ch.delta_s) * partner.op.adjoint();
      const double ldb = linalg::max_abs(ch.op - expected);
      if (ldb > tolerance::kOperator) add(report, "local detailed balance", ldb, label);
    }
  }

  for (int pos = 0; pos < n; ++pos) {
    auto it = spec.feedback.find(pos);
    if (it == spec.feedback.end()) {
      add(report, "feedback entry", 1.0, channel_label(pos) + " has no feedback map");
      continue;
    }
    validate_feedback(report, pos, it->second, dim);
  }
  for (const auto& [k, fb] : spec.feedback) {
    if (k < 0 || k >= n) {
      add(report, "feedback entry", 1.0, "feedback for unknown " + channel_label(k));
    }
  }
  return report;
}

void require_valid(const ModelSpec& spec) {
  const ValidationReport report = validate(spec);
  if (!report.ok()) throw InvalidModel("invalid model: " + report.summary());
}

std::string_view to_string(FeedbackKind kind) {
  switch (kind) {
    case FeedbackKind::identity: return "identity";
    case FeedbackKind::unitary: return "unitary";
    case FeedbackKind::general_unital: return "general_unital";
  }
  return "identity";
}

FeedbackKind feedback_kind_from_string(std::string_view name) {
  if (name == "identity") return FeedbackKind::identity;
  if (name == "unitary") return FeedbackKind::unitary;
  if (name == "general_unital") return FeedbackKind::general_unital;
  throw InvalidParameter("unknown feedback kind '" + std::string(name) + "'");
}

CMatrix gibbs_state(const CMatrix& hamiltonian, double beta) {
  const auto eig = linalg::herm_eig(hamiltonian);
  const double e_min = eig.eigenvalues.minCoeff();
  RVector weights = (-beta * (eig.eigenvalues.array() - e_min)).exp();
  weights /= weights.sum();
  const auto& v = eig.eigenvectors;
  return v * weights.cast<cplx>().asDiagonal() * v.adjoint();
}

ModelSpec thermal_qubit(double beta, double energy_gap, double gamma_down) {
  if (!(beta > 0.0)) throw InvalidParameter("thermal_qubit: beta must be positive");
  if (!(gamma_down > 0.0)) throw InvalidParameter("thermal_qubit: gamma_down must be positive");
  if (!std::isfinite(energy_gap)) throw InvalidParameter("thermal_qubit: energy_gap must be finite");
  const double gamma_up = gamma_down * std::exp(-beta * energy_gap);
  if (!(gamma_up > 0.0)) throw InvalidParameter("thermal_qubit: upward rate underflows");

  ModelSpec spec;
  spec.dim = 2;
  spec.hamiltonian = CMatrix::Zero(2, 2);
  spec.hamiltonian(1, 1) = energy_gap;
  spec.channels.push_back({0, std::sqrt(gamma_down) * linalg::dyad(0, 1, 2), beta * energy_gap, 1, 1.0});
  spec.channels.push_back({1, std::sqrt(gamma_up) * linalg::dyad(1, 0, 2), -beta * energy_gap, 0, -1.0});
  spec.feedback.emplace(0, FeedbackChannel::identity_map(2));
  spec.feedback.emplace(1, FeedbackChannel::identity_map(2));
  spec.initial_state = gibbs_state(spec.hamiltonian, beta);
  return spec;
}

}  // namespace fbtur
