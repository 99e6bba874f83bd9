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

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "opmodel/linops.hpp"

namespace opmodel {

/// Finite semi-metric space: ρ(x,x) = 0, symmetric, triangle inequality,
/// with ρ(x,y) = 0 allowed for x ≠ y.
struct FiniteSemiMetric {
  Eigen::MatrixXd rho;
  std::size_t size() const { return static_cast<std::size_t>(rho.rows()); }
};

/// Cauchy sequence in a finite semi-metric space, kept as its finite stem and
/// the point it is eventually equal to.
///
/// A finite space has a smallest positive distance δ. Once a Cauchy sequence
/// has all later distances below δ its remaining terms lie in a single
/// zero-distance class, so it is route-(I) equivalent to the constant
/// sequence at any of those points. The stem never affects the limit.
struct CauchySequence {
  std::vector<std::size_t> stem;
  std::size_t tail = 0;
};

/// A metric space obtained from S: `classes` partitions the points (route II)
/// or the sequences (route I); `representatives` gives one point of S per
/// class; `dist` is the metric between classes.
struct MetricSpaceResult {
  std::vector<std::vector<std::size_t>> classes;
  std::vector<std::size_t> representatives;
  Eigen::MatrixXd dist;
};

/// Throws AxiomViolation naming the failed axiom and a witness, with every
/// comparison relaxed by the additive tolerance.
FiniteSemiMetric validate_semimetric(const Eigen::MatrixXd& rho, double tol = 0.0);

/// S / ∼ with x ∼ y iff ρ(x,y) ≤ zero_tol; classes ordered by least member.
MetricSpaceResult route2_quotient(const FiniteSemiMetric& s, double zero_tol = 0.0);

/// ρ̃₁(x̃,ỹ) = lim ρ(x(n), y(n)) = ρ(tail_x, tail_y), then quotient by ρ̃₁ = 0.
MetricSpaceResult route1_complete_then_quotient(const FiniteSemiMetric& s,
                                                const std::vector<CauchySequence>& sequences,
                                                double zero_tol = 0.0);

/// Eventually-constant sequences with empty stems, one per point of S.
std::vector<CauchySequence> constant_sequences(const FiniteSemiMetric& s);

struct Isometry {
  std::vector<std::size_t> mapping;  // route-I class → route-II class
  double max_distortion = 0.0;
};

/// J([x̃]) = [tail of x̃]. Throws IsometryFailure unless J is a bijection
/// preserving distances within tol.
Isometry isometry_j(const MetricSpaceResult& r1, const MetricSpaceResult& r2, double tol = 1e-12);

/// Metric axioms on `dist`: zero exactly on the diagonal, positive off it,
/// symmetric, triangle inequality. Residual is the worst violation.
Report verify_metric_axioms(const MetricSpaceResult& r, double tol);

/// ρ(x₁,y₁) = ρ(x₂,y₂) whenever x₁ ∼ x₂ and y₁ ∼ y₂, checked exhaustively.
Report verify_quotient_well_defined(const FiniteSemiMetric& s, const MetricSpaceResult& r2,
                                    double tol);

/// Route (II) for a semi-inner-product space: the fiber quotient used by the
/// model space. Delegates to seminorm_quotient.
RankFactorization seminormed_quotient_bridge(const PsdMatrix& gram);

}  // namespace opmodel
