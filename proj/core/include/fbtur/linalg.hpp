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

#include <complex>
#include <string_view>

#include <Eigen/Dense>

namespace fbtur {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major. Every operator in the library (H, L_k,
/// density operators, Kraus factors, vectorized superoperators) is one of
/// these. Finiteness is checked where matrices enter the library (model
/// validation, file loading) rather than on every construction.
using CMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

namespace linalg {

inline constexpr double kHermitianTolerance = 1e-8;
inline constexpr double kNegativeEigenvalueTolerance = 1e-8;
inline constexpr double kDefaultLogClip = 1e-14;

/// Spectral decomposition A = V diag(λ) V†, eigenvalues ascending.
struct HermitianEig {
  RVector eigenvalues;
  CMatrix eigenvectors;  // columns
};

CMatrix identity(Eigen::Index n);
/// |row⟩⟨col| in dimension n.
CMatrix dyad(Eigen::Index row, Eigen::Index col, Eigen::Index n);

double max_abs(const CMatrix& a);
bool is_finite(const CMatrix& a);
/// Throws NonFiniteInput naming `what` if any entry is NaN or infinite.
void require_finite(const CMatrix& a, std::string_view what);

/// max_ij |A - A†|_ij
double hermitian_residual(const CMatrix& a);
CMatrix hermitian_part(const CMatrix& a);

/// Decomposes the Hermitian part of `a`. Throws NonHermitianInput when the
/// asymmetry exceeds 1e-8 and ConvergenceFailure if the solver fails.
HermitianEig herm_eig(const CMatrix& a);
/// Eigenvalues only (ascending); same preconditions as herm_eig.
RVector herm_eigenvalues(const CMatrix& a);
CMatrix reconstruct(const HermitianEig& eig);

/// V diag(ln max(λ_i, clip)) V†. Throws NegativeEigenvalue if some
/// λ_i < -1e-8.
CMatrix safe_log_psd(const CMatrix& a, double clip = kDefaultLogClip);
CMatrix safe_log_psd(const HermitianEig& eig, double clip = kDefaultLogClip);

CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Row-stacking vectorization: vec(A X B) = (A ⊗ Bᵀ) vec(X).
CVector vec(const CMatrix& a);
CMatrix unvec(const CVector& v, Eigen::Index dim);

}  // namespace linalg
}  // namespace fbtur
