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

#include "opmodel/opmeasure.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace opmodel {

BorelSet::BorelSet(std::vector<Interval> intervals) {
  for (const auto& iv : intervals) {
    if (!(iv.lo < iv.hi)) {
      std::ostringstream os;
      os << "interval (" << iv.lo << ", " << iv.hi << "] is empty or malformed";
      throw Error(ErrorKind::InvalidArgument, os.str());
    }
  }
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (const auto& iv : intervals) {
    if (!intervals_.empty() && iv.lo <= intervals_.back().hi) {
      intervals_.back().hi = std::max(intervals_.back().hi, iv.hi);
    } else {
      intervals_.push_back(iv);
    }
  }
}

bool BorelSet::contains(double x) const {
  for (const auto& iv : intervals_) {
    if (iv.lo < x && x <= iv.hi) return true;
  }
  return false;
}

BorelSet BorelSet::unite(const BorelSet& other) const {
  std::vector<Interval> all = intervals_;
  all.insert(all.end(), other.intervals_.begin(), other.intervals_.end());
  return BorelSet(std::move(all));
}

BorelSet BorelSet::intersect(const BorelSet& other) const {
  std::vector<Interval> out;
  for (const auto& a : intervals_) {
    for (const auto& b : other.intervals_) {
      const double lo = std::max(a.lo, b.lo);
      const double hi = std::min(a.hi, b.hi);
      if (lo < hi) out.push_back({lo, hi});
    }
  }
  return BorelSet(std::move(out));
}

AtomicOperatorMeasure AtomicOperatorMeasure::create(
    Eigen::Index dim, const std::vector<std::pair<double, Matrix>>& atoms, double tol) {
  if (dim < 1) throw Error(ErrorKind::InvalidArgument, "measure dimension must be positive");

  std::map<double, Matrix> merged;
  for (const auto& [lambda, m] : atoms) {
    if (!std::isfinite(lambda)) throw Error(ErrorKind::InvalidArgument, "atom location not finite");
    if (m.rows() != dim || m.cols() != dim) {
      throw Error(ErrorKind::DimensionMismatch, "atom weight does not match measure dimension");
    }
    validate_psd(m, tol);
    auto [it, inserted] = merged.try_emplace(lambda, m);
    if (!inserted) it->second += m;
  }

  std::vector<Atom> validated;
  double largest = 0.0;
  for (const auto& [lambda, m] : merged) {
    validated.push_back({lambda, validate_psd(m, tol)});
    largest = std::max(largest, validated.back().weight.norm2());
  }

  AtomicOperatorMeasure out;
  out.dim_ = dim;
  out.tol_ = tol;
  for (auto& atom : validated) {
    if (largest > 0.0 && atom.weight.norm2() > tol * largest) out.atoms_.push_back(std::move(atom));
  }
  if (out.atoms_.empty()) {
    throw Error(ErrorKind::InvalidArgument, "operator measure has no nonzero atom");
  }
  return out;
}

std::vector<double> AtomicOperatorMeasure::locations() const {
  std::vector<double> out;
  out.reserve(atoms_.size());
  for (const auto& a : atoms_) out.push_back(a.lambda);
  return out;
}

Matrix evaluate_matrix(const AtomicOperatorMeasure& sigma, const BorelSet& b) {
  Matrix sum = Matrix::Zero(sigma.dim(), sigma.dim());
  for (const auto& atom : sigma.atoms()) {
    if (b.contains(atom.lambda)) sum += atom.weight.matrix();
  }
  return sum;
}

PsdMatrix evaluate(const AtomicOperatorMeasure& sigma, const BorelSet& b) {
  return validate_psd(evaluate_matrix(sigma, b), sigma.tol());
}

PsdMatrix total(const AtomicOperatorMeasure& sigma) {
  return evaluate(sigma, BorelSet::real_line());
}

Report verify_monotone_bound(const AtomicOperatorMeasure& sigma,
                             const std::vector<BorelSet>& probes, double tol) {
  const Matrix t = evaluate_matrix(sigma, BorelSet::real_line());
  const double scale = std::max(spectral_norm(t), std::numeric_limits<double>::min());
  double worst = 0.0;
  for (const auto& b : probes) {
    const Matrix s = evaluate_matrix(sigma, b);
    worst = std::max({worst, -min_eigenvalue(t - s) / scale, -min_eigenvalue(s) / scale});
  }
  return Report::make("monotone_bound", worst, tol);
}

ScalarMeasure control_measure(const AtomicOperatorMeasure& sigma, const Matrix& onb) {
  if (onb.rows() != sigma.dim() || onb.cols() != sigma.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "basis must have d columns of length d");
  }
  ScalarMeasure mu;
  for (std::size_t j = 0; j < sigma.size(); ++j) {
    const auto& atom = sigma.atoms()[j];
    double mass = 0.0;
    double weight = 0.5;
    for (Eigen::Index n = 0; n < onb.cols(); ++n, weight *= 0.5) {
      mass += weight * onb.col(n).dot(atom.weight.matrix() * onb.col(n)).real();
    }
    if (!(mass > 0.0)) {
      std::ostringstream os;
      os << "nonzero atom at " << atom.lambda << " has control mass " << mass;
      throw Error(ErrorKind::ZeroAtom, os.str());
    }
    mu.lambdas.push_back(atom.lambda);
    mu.masses.push_back(mass);
  }
  return mu;
}

KernelSplit kernel_split(const PsdMatrix& t) {
  const RankFactorization q = psd_factorize(t);
  Matrix t1 = q.range_basis.adjoint() * t.matrix() * q.range_basis;
  return KernelSplit{q.kernel_basis, q.range_basis, validate_psd(t1, t.tol())};
}

Report verify_kernel_inclusion(const AtomicOperatorMeasure& sigma, const KernelSplit& split,
                               double tol) {
  double worst = 0.0;
  for (const auto& atom : sigma.atoms()) {
    const double scale = atom.weight.norm2();
    if (scale == 0.0 || split.k0.cols() == 0) continue;
    const Matrix image = atom.weight.matrix() * split.k0;
    for (Eigen::Index c = 0; c < image.cols(); ++c) {
      worst = std::max(worst, image.col(c).norm() / scale);
    }
  }
  return Report::make("kernel_inclusion", worst, tol, ErrorKind::InclusionViolation);
}

BorelSet atom_set(const AtomicOperatorMeasure& sigma, std::size_t j) {
  const auto& atoms = sigma.atoms();
  const double lo = j == 0 ? -kInf : atoms[j - 1].lambda;
  return BorelSet::interval(lo, atoms[j].lambda);
}

Report block_check(const AtomicOperatorMeasure& sigma, const KernelSplit& split, double tol,
                   const std::vector<BorelSet>& probes) {
  const Eigen::Index q = split.k0.cols();
  const Eigen::Index d = sigma.dim();
  if (q == 0) return Report::make("block_diagonal", 0.0, tol, ErrorKind::BlockViolation);

  Matrix frame(d, d);
  frame << split.k0, split.k1;
  const double scale =
      std::max(spectral_norm(evaluate_matrix(sigma, BorelSet::real_line())),
               std::numeric_limits<double>::min());

  std::vector<BorelSet> sets;
  for (std::size_t j = 0; j < sigma.size(); ++j) sets.push_back(atom_set(sigma, j));
  sets.insert(sets.end(), probes.begin(), probes.end());

  double worst = 0.0;
  for (const auto& b : sets) {
    const Matrix blocks = frame.adjoint() * evaluate_matrix(sigma, b) * frame;
    // K₀ rows and K₀ columns; the K₀K₀ corner is counted once.
    const double off = std::sqrt(blocks.topRows(q).squaredNorm() +
                                 blocks.bottomLeftCorner(d - q, q).squaredNorm());
    worst = std::max(worst, off / scale);
  }
  return Report::make("block_diagonal", worst, tol, ErrorKind::BlockViolation);
}

}  // namespace opmodel
