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

#include <limits>
#include <utility>
#include <vector>

#include "opmodel/linops.hpp"

namespace opmodel {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Finite union of half-open intervals (a, b], possibly unbounded.
///
/// Stored sorted with overlapping and adjacent pieces merged, so two sets
/// describing the same points compare equal.
class BorelSet {
 public:
  struct Interval {
    double lo;
    double hi;
    bool operator==(const Interval&) const = default;
  };

  BorelSet() = default;
  /// Throws InvalidArgument unless every interval has lo < hi.
  explicit BorelSet(std::vector<Interval> intervals);

  static BorelSet empty_set() { return {}; }
  static BorelSet real_line() { return BorelSet({{-kInf, kInf}}); }
  static BorelSet interval(double lo, double hi) { return BorelSet({{lo, hi}}); }

  bool empty() const { return intervals_.empty(); }
  bool contains(double x) const;
  const std::vector<Interval>& intervals() const { return intervals_; }

  BorelSet unite(const BorelSet& other) const;
  BorelSet intersect(const BorelSet& other) const;

  bool operator==(const BorelSet&) const = default;

 private:
  std::vector<Interval> intervals_;
};

struct Atom {
  double lambda;
  PsdMatrix weight;
};

/// Σ = Σ_j M_j δ_{λ_j} with M_j ⪰ 0 on ℂ^d.
class AtomicOperatorMeasure {
 public:
  /// Validates each weight, merges duplicate locations by adding weights,
  /// sorts by location and drops numerically zero atoms (largest eigenvalue
  /// ≤ tol times the largest atom's). Throws InvalidArgument when no nonzero
  /// atom remains.
  static AtomicOperatorMeasure create(Eigen::Index dim,
                                      const std::vector<std::pair<double, Matrix>>& atoms,
                                      double tol = kDefaultTol);

  Eigen::Index dim() const { return dim_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  double tol() const { return tol_; }
  std::vector<double> locations() const;

 private:
  AtomicOperatorMeasure() = default;
  Eigen::Index dim_ = 0;
  double tol_ = kDefaultTol;
  std::vector<Atom> atoms_;
};

/// Control measure aligned atom-by-atom with its operator measure.
struct ScalarMeasure {
  std::vector<double> lambdas;
  std::vector<double> masses;
};

/// K = K₀ ⊕ K₁ with K₀ = ker T and T₁ the compression of T to K₁.
struct KernelSplit {
  Matrix k0;  // d × dim K₀, orthonormal columns
  Matrix k1;  // d × dim K₁, orthonormal columns
  PsdMatrix t1;
};

/// Sum of the weights of atoms lying in B, accumulated in atom order.
Matrix evaluate_matrix(const AtomicOperatorMeasure& sigma, const BorelSet& b);
PsdMatrix evaluate(const AtomicOperatorMeasure& sigma, const BorelSet& b);

/// T = Σ(ℝ).
PsdMatrix total(const AtomicOperatorMeasure& sigma);

/// Checks 0 ≤ Σ(B) ≤ T on the probe sets; residual is the most negative
/// eigenvalue of T − Σ(B), relative to ‖T‖₂.
Report verify_monotone_bound(const AtomicOperatorMeasure& sigma, const std::vector<BorelSet>& probes,
                             double tol);

/// μ_j = Σ_n 2^{−n} (e_n, M_j e_n) over the columns e_1, e_2, ... of `onb`.
/// Throws ZeroAtom if a nonzero atom receives no mass (the basis is broken).
ScalarMeasure control_measure(const AtomicOperatorMeasure& sigma, const Matrix& onb);

KernelSplit kernel_split(const PsdMatrix& t);

/// max_j max_{v ∈ K₀} ‖M_j v‖ / ‖M_j‖₂ against tol; fails with InclusionViolation.
Report verify_kernel_inclusion(const AtomicOperatorMeasure& sigma, const KernelSplit& split,
                               double tol);

/// Compresses Σ(B) into the K₀ ⊕ K₁ frame for every single-atom set and every
/// probe, and measures the K₀ rows and columns relative to ‖T‖₂. Fails with
/// BlockViolation.
Report block_check(const AtomicOperatorMeasure& sigma, const KernelSplit& split, double tol,
                   const std::vector<BorelSet>& probes = {});

/// A set (a, λ_j] that contains atom j and no other atom.
BorelSet atom_set(const AtomicOperatorMeasure& sigma, std::size_t j);

}  // namespace opmodel
