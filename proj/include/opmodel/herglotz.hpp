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

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "opmodel/perturbation.hpp"

namespace opmodel {

/// Integrand convention of the measure part.
///   Stieltjes:  ∫ dΩ(λ)·1/(λ − z)
///   Nevanlinna: ∫ dΩ(λ)·[1/(λ − z) − λ/(1 + λ²)]
enum class HerglotzForm { Stieltjes, Nevanlinna };

/// m(z) = C + D·z + ∫ dΩ(λ)·(integrand), k × k.
struct MatrixHerglotz {
  Matrix c;
  Matrix d;
  std::optional<AtomicOperatorMeasure> omega;  // empty: no measure part
  HerglotzForm form = HerglotzForm::Nevanlinna;

  /// Throws NotHermitian / NotPsd / DimensionMismatch.
  static MatrixHerglotz create(Matrix c, Matrix d, std::optional<AtomicOperatorMeasure> omega,
                               HerglotzForm form, double tol = kDefaultTol);

  Eigen::Index k() const { return c.rows(); }
};

using MatrixFunction = std::function<Matrix(Complex)>;

/// m(z) for Im z > 0; throws LowerHalfPlane otherwise.
Matrix eval(const MatrixHerglotz& h, Complex z);
/// The defining formula at any non-real z.
Matrix eval_formula(const MatrixHerglotz& h, Complex z);
MatrixFunction evaluator(const MatrixHerglotz& h);

/// C of the Nevanlinna representation of h. For the Stieltjes form this is
/// ∫ dΩ(λ)·λ/(1 + λ²).
Matrix nevanlinna_c(const MatrixHerglotz& h);

struct RecoveredCD {
  Matrix c;
  Matrix d;
};

/// C = Hermitian part of m(i). D = lim m(iη)/(iη), from the Hermitian part at
/// η ∈ {10², 10³, 10⁴} with Richardson extrapolation in η^{−2}. Throws
/// NonConvergent when the two extrapolants differ by more than 1e−6 (relative
/// to max(1, ‖D‖_F)).
RecoveredCD recover_cd(const MatrixFunction& m);

inline const std::vector<double> kDefaultEpsLadder{1e-3, 1e-4, 1e-5, 1e-6, 1e-7};

/// Atom weight at λ₀ as lim ε·Im m(λ₀ + iε), Richardson-extrapolated in ε²
/// over consecutive ladder pairs. Throws NonConvergent when the last two
/// extrapolants differ by more than 1e−6 (relative to max(1, ‖W‖_F)).
PsdMatrix stieltjes_invert(const MatrixFunction& m, double lambda0,
                           const std::vector<double>& ladder = kDefaultEpsLadder);
PsdMatrix stieltjes_invert(const MatrixHerglotz& h, double lambda0,
                           const std::vector<double>& ladder = kDefaultEpsLadder);

struct ScanResult {
  Report report;  // residual: max(0, −min eigenvalue); tolerance 1e−10
  double min_eigenvalue = 0.0;
  Complex argmin = 0.0;
};

/// Smallest eigenvalue of Im m(z) over the grid.
ScanResult herglotz_scan(const MatrixFunction& m, const std::vector<Complex>& grid);

/// 10 × 10 points: Re z ∈ [−5, 5] evenly, Im z ∈ [10⁻², 10] log-spaced.
std::vector<Complex> default_grid();

/// One row per z: Re z, Im z, then re/im of every entry of Im m(z), row-major.
void write_im_csv(const MatrixFunction& m, const std::vector<Complex>& grid, std::ostream& out);

/// M_L(z) of a perturbation as a Stieltjes-form function with C = D = 0.
MatrixHerglotz from_perturbation(const PerturbationInstance& inst, double tol = kDefaultTol);

/// M_{H,N} as a Nevanlinna-form function with C = D = 0 and Ω = Ω_{H,N}.
MatrixHerglotz from_weyl_titchmarsh(const Matrix& h, const Matrix& nbasis, double tol = kDefaultTol);

}  // namespace opmodel
