// Copyright 2026 The opmodel Authors.
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
#include <cstddef>

#include <Eigen/Dense>

#include "opmodel/error.hpp"

namespace opmodel {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kDefaultTol = 1e-10;

/// Hermitian positive semidefinite matrix together with its eigendecomposition.
///
/// Only `validate_psd` constructs one. The stored matrix is the hermitized
/// input (M + Mᴴ)/2. Eigenvalues are sorted descending; each eigenvector is
/// phased so that its first nonzero component is positive real.
class PsdMatrix {
 public:
  const Matrix& matrix() const { return matrix_; }
  double tol() const { return tol_; }
  Eigen::Index dim() const { return matrix_.rows(); }

  const RealVector& eigenvalues() const { return eigenvalues_; }
  const Matrix& eigenvectors() const { return eigenvectors_; }

  /// Largest eigenvalue, clamped at zero.
  double norm2() const;
  /// Eigenvalues at or below this value count as zero.
  double cutoff() const { return tol_ * norm2(); }
  Eigen::Index rank() const;

 private:
  friend PsdMatrix validate_psd(const Matrix& m, double tol);
  PsdMatrix() = default;

  Matrix matrix_;
  double tol_ = kDefaultTol;
  RealVector eigenvalues_;
  Matrix eigenvectors_;
};

/// Quotient of ℂ^d by the numerical kernel of a PSD matrix M.
///
/// `factor` is r×d with factorᴴ·factor ≈ M; `kernel_basis` holds d−r
/// orthonormal columns and `range_basis` the complementary r columns.
struct RankFactorization {
  Eigen::Index rank = 0;
  Matrix factor;
  Matrix kernel_basis;
  Matrix range_basis;
  RealVector values;  // kept eigenvalues, descending

  Eigen::Index dim() const { return factor.cols(); }
  /// Coordinates of v in the quotient space: factor·v.
  Vector coordinates(const Vector& v) const { return factor * v; }
  /// Right inverse of `factor`: range_basis·diag(1/√values).
  Matrix factor_pinv() const;
};

/// Validates squareness, finiteness, hermiticity and positivity.
/// Throws NotHermitian when ‖M − Mᴴ‖_F > tol·max(1, ‖M‖_F) and NotPsd when an
/// eigenvalue of (M + Mᴴ)/2 falls below −tol·‖M‖₂.
PsdMatrix validate_psd(const Matrix& m, double tol = kDefaultTol);

RankFactorization psd_factorize(const PsdMatrix& m);

/// M^α for α ∈ (0, 1]; eigenvalues at or below the cutoff map to zero.
PsdMatrix frac_power(const PsdMatrix& m, double alpha);

/// Pseudo-inverse power: eigenvalues above the cutoff map to λ^{−α}, the rest
/// to zero.
PsdMatrix pinv_power(const PsdMatrix& m, double alpha);

/// Orthogonal projector onto the numerical range of M.
Matrix range_projector(const PsdMatrix& m);

/// σ_max(G^{−α}·F^α) on ran(G) for 0 ≤ F ≤ G and α ∈ (0, 1/2].
/// Throws OrderViolation if G − F is not PSD within tol.
double heinz_contraction(const PsdMatrix& f, const PsdMatrix& g, double alpha);

/// ‖(I − P_G)·F^α‖_F ≤ tol·‖F^α‖_F, with P_G the projector onto ran(G^α).
bool range_inclusion(const PsdMatrix& f, const PsdMatrix& g, double alpha, double tol);

/// Residual ‖(I − P_G)·F^α‖_F / ‖F^α‖_F behind `range_inclusion` (0 when F = 0).
double range_inclusion_residual(const PsdMatrix& f, const PsdMatrix& g, double alpha);

/// Quotient of a finite-dimensional semi-inner-product space by its null
/// vectors. Same contract as `psd_factorize`.
RankFactorization seminorm_quotient(const PsdMatrix& gram);

// Helpers shared across modules.

bool all_finite(const Matrix& m);
Matrix hermitian_part(const Matrix& m);
/// (M − Mᴴ)/(2i), the operator imaginary part.
Matrix imaginary_part(const Matrix& m);
double spectral_norm(const Matrix& m);
/// Smallest eigenvalue of the Hermitian part of m.
double min_eigenvalue(const Matrix& m);
/// Max deviation of the columns from an orthonormal system, ‖QᴴQ − I‖_F.
double orthonormality_defect(const Matrix& q);

}  // namespace opmodel
