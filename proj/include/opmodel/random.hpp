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

#include <cstdint>
#include <utility>

#include "opmodel/completion.hpp"
#include "opmodel/herglotz.hpp"

namespace opmodel {

/// SplitMix64 stream keyed by (seed, instance index, field tag).
///
/// The initial state is mix(seed ⊕ mix(index ⊕ mix(field))) where mix is the
/// SplitMix64 finalizer; each draw advances the state by the golden-ratio
/// increment. Uniforms use the top 53 bits, normals use Box–Muller, so the
/// streams are identical on every platform.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t index, std::uint64_t field);

  std::uint64_t next_u64();
  double uniform();                           // [0, 1)
  double uniform(double lo, double hi);       // [lo, hi)
  /// Uniform integer in [lo, hi].
  std::int64_t integer(std::int64_t lo, std::int64_t hi);
  double normal();
  Complex complex_normal();                   // E|z|² = 1

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Field tags separating the streams of one instance.
namespace field {
inline constexpr std::uint64_t kMeasure = 1;
inline constexpr std::uint64_t kProbe = 2;
inline constexpr std::uint64_t kPerturbation = 3;
inline constexpr std::uint64_t kHerglotz = 4;
inline constexpr std::uint64_t kSemiMetric = 5;
inline constexpr std::uint64_t kHeinz = 6;
inline constexpr std::uint64_t kBasis = 7;
}  // namespace field

namespace gen {

Matrix complex_gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols);
Vector random_vector(Rng& rng, Eigen::Index d);
/// AᴴA with A of shape rank × d, scaled by 1/d.
Matrix random_psd(Rng& rng, Eigen::Index d, Eigen::Index rank);
Matrix random_hermitian(Rng& rng, Eigen::Index n);
Matrix random_unitary(Rng& rng, Eigen::Index d);

struct MeasureCaps {
  Eigen::Index max_dim = 6;
  std::size_t max_atoms = 8;
};

/// Distinct locations in [−5, 5] at least 0.05 apart and weights of random
/// rank. With force_kernel, d ≥ 2 and every weight is supported on a common
/// random subspace of dimension < d, so ker T ≠ {0}.
AtomicOperatorMeasure random_measure(Rng& rng, const MeasureCaps& caps, bool force_kernel = false);

/// Integer-valued weights at integer locations, so sums are exact.
AtomicOperatorMeasure random_integer_measure(Rng& rng, const MeasureCaps& caps);

/// Zero to three intervals with endpoints in [−6, 6], sometimes unbounded.
BorelSet random_borel_set(Rng& rng);

StepFunction random_step_function(Rng& rng, Eigen::Index d);

/// n ≤ max_n, k ≤ min(max_k, n). With require_generating, redraws until
/// the spectral orbits of ran K span ℂ^n.
PerturbationInstance random_perturbation(Rng& rng, Eigen::Index max_n, Eigen::Index max_k,
                                         bool require_generating = true);

/// Nevanlinna-form function with k ≤ max_k and up to max_atoms atoms at
/// locations in [−5, 5] at least 0.25 apart; D is zero for about a third of
/// draws.
MatrixHerglotz random_herglotz(Rng& rng, Eigen::Index max_k = 3, std::size_t max_atoms = 5);

/// Shortest-path closure of random integer weights between randomly planted
/// classes; points in the same class are at distance zero.
FiniteSemiMetric random_semimetric(Rng& rng, std::size_t max_n = 12);

/// F ⪰ 0 and G = F + RᴴR, d ≤ max_dim, ranks random (zero allowed).
std::pair<Matrix, Matrix> random_ordered_pair(Rng& rng, Eigen::Index max_dim = 8);

}  // namespace gen

}  // namespace opmodel
