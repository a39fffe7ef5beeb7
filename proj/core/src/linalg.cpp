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

#include "fbtur/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fbtur/errors.hpp"

namespace fbtur::linalg {

namespace {

using ColMatrix = Eigen::MatrixXcd;

void require_square(const CMatrix& a, std::string_view op) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw DimensionMismatch(std::string(op) + ": expected a non-empty square matrix, got " +
                            std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

ColMatrix checked_hermitian(const CMatrix& a, std::string_view op) {
  require_square(a, op);
  require_finite(a, op);
  const double asym = hermitian_residual(a);
  if (asym > kHermitianTolerance) {
    throw NonHermitianInput(std::string(op) + ": asymmetry " + std::to_string(asym) +
                            " exceeds tolerance");
  }
  return ColMatrix(hermitian_part(a));
}

}  // namespace

CMatrix identity(Eigen::Index n) { return CMatrix::Identity(n, n); }

CMatrix dyad(Eigen::Index row, Eigen::Index col, Eigen::Index n) {
  CMatrix d = CMatrix::Zero(n, n);
  d(row, col) = 1.0;
  return d;
}

double max_abs(const CMatrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

bool is_finite(const CMatrix& a) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const cplx z = a.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

void require_finite(const CMatrix& a, std::string_view what) {
  if (!is_finite(a)) throw NonFiniteInput(std::string(what) + ": matrix has non-finite entries");
}

double hermitian_residual(const CMatrix& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  return max_abs(a - a.adjoint());
}

CMatrix hermitian_part(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

HermitianEig herm_eig(const CMatrix& a) {
  const ColMatrix h = checked_hermitian(a, "herm_eig");
  Eigen::SelfAdjointEigenSolver<ColMatrix> solver(h, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw ConvergenceFailure("herm_eig: eigensolver did not converge");
  return {solver.eigenvalues(), CMatrix(solver.eigenvectors())};
}

RVector herm_eigenvalues(const CMatrix& a) {
  const ColMatrix h = checked_hermitian(a, "herm_eigenvalues");
  Eigen::SelfAdjointEigenSolver<ColMatrix> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceFailure("herm_eigenvalues: eigensolver did not converge");
  }
  return solver.eigenvalues();
}

CMatrix reconstruct(const HermitianEig& eig) {
  const auto& v = eig.eigenvectors;
  return v * eig.eigenvalues.cast<cplx>().asDiagonal() * v.adjoint();
}

CMatrix safe_log_psd(const HermitianEig& eig, double clip) {
  if (!(clip > 0.0)) throw InvalidParameter("safe_log_psd: clip must be positive");
  const Eigen::Index n = eig.eigenvalues.size();
  RVector logs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lambda = eig.eigenvalues(i);
    if (lambda < -kNegativeEigenvalueTolerance) {
      throw NegativeEigenvalue("safe_log_psd: eigenvalue " + std::to_string(lambda));
    }
    logs(i) = std::log(std::max(lambda, clip));
  }
  const auto& v = eig.eigenvectors;
  return v * logs.cast<cplx>().asDiagonal() * v.adjoint();
}

CMatrix safe_log_psd(const CMatrix& a, double clip) { return safe_log_psd(herm_eig(a), clip); }

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CVector vec(const CMatrix& a) {
  // Row-major storage makes the row-stacked vector the raw buffer.
  return Eigen::Map<const CVector>(a.data(), a.size());
}

CMatrix unvec(const CVector& v, Eigen::Index dim) {
  if (v.size() != dim * dim) {
    throw DimensionMismatch("unvec: vector of size " + std::to_string(v.size()) +
                            " is not a " + std::to_string(dim) + "x" + std::to_string(dim) +
                            " matrix");
  }
  return Eigen::Map<const CMatrix>(v.data(), dim, dim);
}

}  // namespace fbtur::linalg
