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
#include <vector>

#include "opmodel/opmeasure.hpp"

namespace opmodel {

/// Fiber K_λ at one atom: the Radon–Nikodym Gram Φ_j = M_j / μ_j and its
/// quotient by null vectors. Fiber coordinates of v are quotient.factor·v.
struct Fiber {
  double lambda;
  double mu;
  PsdMatrix gram;
  RankFactorization quotient;
};

/// L²(ℝ; dμ; M_Σ) for an atomic Σ. Off-atom fibers carry no mass and are not
/// stored. Treat as immutable once built.
struct ModelSpace {
  AtomicOperatorMeasure sigma;
  Matrix onb;
  ScalarMeasure mu;
  std::vector<Fiber> fibers;
  PsdMatrix total;  // T = Σ(ℝ)
  KernelSplit split;
  Eigen::Index total_dim;

  Eigen::Index dim() const { return sigma.dim(); }
};

/// Element of the model space: one representative in ℂ^d per atom. Equality
/// is L² equality (zero distance), not entrywise equality.
struct ModelVector {
  std::vector<Vector> per_atom;
};

/// u(λ) = Σ_terms χ_B(λ)·ξ; overlapping terms add.
struct StepFunction {
  struct Term {
    BorelSet set;
    Vector xi;
  };
  std::vector<Term> terms;

  Vector at(double lambda, Eigen::Index dim) const;
};

/// Strictly positive weight evaluated at atom locations. Empty means w ≡ 1.
using WeightFn = std::function<double(double)>;

/// w₁(λ) = 1 + λ².
double weight_w1(double lambda);

ModelSpace build_model(const AtomicOperatorMeasure& sigma, const Matrix& onb,
                       double tol = kDefaultTol);
/// Standard basis of ℂ^d.
ModelSpace build_model(const AtomicOperatorMeasure& sigma, double tol = kDefaultTol);

/// (f, g) = Σ_j w(λ_j)·μ_j·f_jᴴ Φ_j g_j; linear in g.
Complex inner(const ModelSpace& ms, const ModelVector& f, const ModelVector& g,
              const WeightFn& w = {});
double norm_squared(const ModelSpace& ms, const ModelVector& f, const WeightFn& w = {});

/// Orthonormal coordinates ⊕_j √μ_j·B_j f_j in ℂ^{total_dim}.
Vector coordinates(const ModelSpace& ms, const ModelVector& f);

ModelVector zero_vector(const ModelSpace& ms);
ModelVector operator-(const ModelVector& a, const ModelVector& b);

/// Constant family λ ↦ ξ.
ModelVector lambda_embed(const ModelSpace& ms, const Vector& xi);

/// λ ↦ χ_B(λ)·f(λ).
ModelVector restrict_to(const ModelSpace& ms, const BorelSet& b, const ModelVector& f);

/// G_{mn} = (Λe_m, Λe_n) over the columns of `onb`.
Matrix gram_lambda(const ModelSpace& ms, const Matrix& onb);
/// ‖Λ‖ as the square root of the largest eigenvalue of the Gram of Λ.
double lambda_norm(const ModelSpace& ms);
/// ‖G − onbᴴ·T·onb‖_F / ‖T‖_F.
Report verify_gram_lambda(const ModelSpace& ms, const Matrix& onb, double tol);

/// |(η, Σ(B)ξ) − Σ_{λ_j∈B} μ_j ηᴴΦ_jξ| relative to ‖η‖‖ξ‖‖T‖₂.
Report verify_parseval(const ModelSpace& ms, const BorelSet& b, const Vector& eta,
                       const Vector& xi, double tol);

/// S(B) = diag(I_{K₀}, T₁^{−1/2} Σ₁(B)^{1/2}) in the K₀ ⊕ K₁ frame, returned in
/// standard coordinates. Exactly the identity when B contains every atom.
Matrix s_operator(const ModelSpace& ms, const BorelSet& b);

/// ‖T^{1/2}S(B) − Σ(B)^{1/2}‖_F relative to ‖T^{1/2}‖_F.
Report verify_s_intertwining(const ModelSpace& ms, const BorelSet& b, double tol);
/// ‖S(B)‖ on the K₁ block minus one, clamped at zero.
Report verify_s_contraction(const ModelSpace& ms, const BorelSet& b, double tol);

/// L² distance² between Λ(S(B)ξ) and χ_B·Λξ relative to ‖ξ‖²‖T‖₂.
///
/// Only the Gram form of this identity (see verify_covariance_gram) holds for
/// a general atomic Σ; the vector form fails whenever Λ(K) is not invariant
/// under multiplication by χ_B.
Report verify_multiplication_covariance(const ModelSpace& ms, const BorelSet& b,
                                        const Vector& xi, double tol);

/// (ΛS(B)e_m, ΛS(B)e_n) = (χ_BΛe_m, χ_BΛe_n) for all basis pairs, i.e.
/// S(B)ᴴ·T·S(B) = Σ(B), relative to ‖T‖₂.
Report verify_covariance_gram(const ModelSpace& ms, const BorelSet& b, double tol);

/// Rank of the Gram of {χ_{atom j}·Λe_n}.
Eigen::Index step_span_dimension(const ModelSpace& ms);

/// Multiplication by λ in fiber coordinates, with its step spectral family.
struct MultiplicationOperator {
  Matrix h;                            // block diag(λ_j·I_{r_j})
  std::vector<double> lambdas;         // per fiber
  std::vector<Eigen::Index> offsets;   // first coordinate of each fiber block
  std::vector<Eigen::Index> ranks;

  /// Ê(λ): identity on fibers with λ_j ≤ λ, zero elsewhere.
  Matrix projector_at(double lambda) const;
};
MultiplicationOperator multiplication_operator(const ModelSpace& ms);

/// Riemann–Stieltjes value Σ_j (u(λ_j), M_j u(λ_j)).
double berezanskii_norm(const ModelSpace& ms, const StepFunction& u);
/// The model vector ũ_j = u(λ_j).
ModelVector to_model_vector(const ModelSpace& ms, const StepFunction& u);
/// |berezanskii_norm(u) − ‖ũ‖²| relative to berezanskii_norm(u).
Report verify_berezanskii(const ModelSpace& ms, const StepFunction& u, double tol);

/// Builds models for two bases and compares the un-normalized fiber Grams
/// μ_j·Φ_j (and μ'_j·Φ'_j) against each other, relative to ‖M_j‖_F. Fails
/// with UniquenessViolation.
Report verify_uniqueness(const AtomicOperatorMeasure& sigma, const Matrix& onb1,
                         const Matrix& onb2, double tol);

/// Ψ_j = Kᴴ M_j K / μ_j and Σ(B) = Σ_{λ_j∈B} μ_j K^{−ᴴ} Ψ_j K^{−1}, the latter
/// assembled through Ψ_j^{1/2}. Checked on every single-atom set, on ℝ and
/// on the probes, relative to ‖T‖₂.
Report gelfand_kostyuchenko_check(const AtomicOperatorMeasure& sigma, const Matrix& kop,
                                  double tol, const std::vector<BorelSet>& probes = {});

/// λ ↦ (λ − i)^{−1}·v.
ModelVector weighted_embed(const ModelSpace& ms, const Vector& v);

}  // namespace opmodel
