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

#include <vector>

#include "opmodel/model_space.hpp"

namespace opmodel {

/// H_L = H₀ + K·L·Kᴴ on ℂ^n with K: ℂ^k → ℂ^n.
struct PerturbationInstance {
  Matrix h0;    // n × n, Hermitian
  Matrix kmap;  // n × k
  Matrix ell;   // k × k, Hermitian

  /// Throws NotHermitian / DimensionMismatch / InvalidArgument (n ≥ k ≥ 1).
  static PerturbationInstance create(Matrix h0, Matrix kmap, Matrix ell, double tol = kDefaultTol);

  Eigen::Index n() const { return h0.rows(); }
  Eigen::Index k() const { return kmap.cols(); }
};

/// Eigenvalue clusters of a Hermitian matrix with their spectral projectors.
struct SpectralFamily {
  std::vector<double> eigenvalues;  // strictly increasing cluster values
  std::vector<Matrix> bases;        // orthonormal columns per cluster
  std::vector<Matrix> projectors;   // bases[i]·bases[i]ᴴ

  /// E(λ) = Σ_{λ_i ≤ λ} P_i.
  Matrix at(double lambda) const;
  Eigen::Index dim() const { return projectors.empty() ? 0 : projectors.front().rows(); }
};

Matrix build_hl(const PerturbationInstance& inst);

/// Eigenvalues within tol·‖H‖₂ of their neighbour are merged into one
/// cluster located at the cluster mean.
SpectralFamily spectral_family(const Matrix& h, double tol = kDefaultTol);

/// Orthogonality, resolution of identity and reconstruction H = Σ λ_i P_i,
/// relative to max(1, ‖H‖_F).
Report verify_spectral_family(const SpectralFamily& family, const Matrix& h, double tol);

/// Ω_L = Σ_i δ_{λ_i}·Kᴴ P_i K. Throws DegenerateCoupling when every atom
/// vanishes (K = 0).
AtomicOperatorMeasure omega_measure(const PerturbationInstance& inst, double tol = kDefaultTol);

/// ‖Ω_L(ℝ) − KᴴK‖_F / ‖KᴴK‖_F.
Report verify_omega_total(const PerturbationInstance& inst, double tol);

struct MFunction {
  Matrix direct;     // Kᴴ(H_L − z)^{−1}K
  Matrix stieltjes;  // Σ_i (λ_i − z)^{−1} Kᴴ P_i K
};

/// Throws RealShift when Im z = 0.
MFunction m_function(const PerturbationInstance& inst, Complex z);

/// Direct and Stieltjes forms agree, relative to max(1, ‖direct‖_F).
Report verify_m_function(const PerturbationInstance& inst, Complex z, double tol);
/// Smallest eigenvalue of Im M_L(z) / Im z, negated and clamped at zero.
Report verify_m_herglotz(const PerturbationInstance& inst, Complex z, double tol);

struct GeneratedSubspace {
  Matrix basis;  // n × g orthonormal columns spanning {P_i K e_m}
  Eigen::Index generated_dim = 0;
  bool is_generating = false;
};

/// Singular values below √tol·σ_max of [P_i K]_i count as zero.
GeneratedSubspace generating_check(const PerturbationInstance& inst, double tol = kDefaultTol);

/// U_L from the model space of Ω_L onto the generated subspace.
///
/// Fiber block j maps to P_i K·B_j⁺/√μ_j, which sends the class of
/// χ_{atom j}·Λe_m to P_i K e_m. Columns are indexed by fiber coordinates of
/// the Ω_L model.
struct ModelUnitary {
  Matrix u;  // n × model dim
  SpectralFamily family;
  AtomicOperatorMeasure omega;
  ModelSpace model;
  std::vector<std::size_t> atom_cluster;  // omega atom → spectral cluster
  GeneratedSubspace generated;
};

ModelUnitary model_unitary(const PerturbationInstance& inst, double tol = kDefaultTol);

struct DiagonalizationReport {
  Report isometry;       // ‖UᴴU − I‖_F
  Report coisometry;     // ‖UUᴴ − P_gen‖_F
  Report conjugation;    // ‖UᴴH_L U − Ĥ‖_F / ‖H_L‖_F
  Report spectral_pullback;  // max over λ of ‖UᴴE_L(λ)U − Ê(λ)‖_F
  Eigen::Index generated_dim = 0;
  Eigen::Index n = 0;
  bool generating = false;

  bool pass() const {
    return isometry.pass && coisometry.pass && conjugation.pass && spectral_pullback.pass;
  }
};

DiagonalizationReport verify_diagonalization(const PerturbationInstance& inst, double tol,
                                             double cutoff = kDefaultTol);
DiagonalizationReport verify_diagonalization(const ModelUnitary& mu, const Matrix& hl, double tol);

/// M_{H,N}(z) = z·I_N + (1 + z²)·Nᴴ(H − z)^{−1}N for N with orthonormal
/// columns. Throws RealShift when Im z = 0.
Matrix weyl_titchmarsh(const Matrix& h, const Matrix& nbasis, Complex z);

/// Atoms (λ_i, (1 + λ_i²)·Nᴴ P_i N) of Ω_{H,N}; zero atoms are kept.
std::vector<std::pair<double, Matrix>> weyl_titchmarsh_atoms(const Matrix& h, const Matrix& nbasis,
                                                             double tol = kDefaultTol);

/// ‖Σ_i (1 + λ_i²)^{−1}·Ω_i − I_N‖_F.
Report verify_wt_normalization(const Matrix& h, const Matrix& nbasis, double tol);

/// M_{H,N}(z) against Σ_i Ω_i·[1/(λ_i − z) − λ_i/(1 + λ_i²)], relative to
/// max(1, ‖M‖_F).
Report verify_wt_representation(const Matrix& h, const Matrix& nbasis, Complex z, double tol);

}  // namespace opmodel
