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

#include "opmodel/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace opmodel {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Sorted locations in [lo, hi] with pairwise spacing at least `gap`.
std::vector<double> spaced_locations(Rng& rng, std::size_t count, double lo, double hi, double gap) {
  for (;;) {
    std::vector<double> xs;
    for (std::size_t i = 0; i < count; ++i) xs.push_back(rng.uniform(lo, hi));
    std::sort(xs.begin(), xs.end());
    bool ok = true;
    for (std::size_t i = 1; i < xs.size(); ++i) ok = ok && xs[i] - xs[i - 1] >= gap;
    if (ok) return xs;
  }
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t index, std::uint64_t field)
    : state_(mix(seed ^ mix(index ^ mix(field)))) {}

std::uint64_t Rng::next_u64() {
  state_ += kGolden;
  return mix(state_);
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::int64_t Rng::integer(std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(next_u64() % span);
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u = 0.0;
  while (u == 0.0) u = uniform();
  const double v = uniform();
  const double r = std::sqrt(-2.0 * std::log(u));
  const double angle = 2.0 * std::numbers::pi * v;
  spare_ = r * std::sin(angle);
  has_spare_ = true;
  return r * std::cos(angle);
}

Complex Rng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return Complex(re, im) * std::numbers::sqrt2 * 0.5;
}

namespace gen {

Matrix complex_gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.complex_normal();
  }
  return m;
}

Vector random_vector(Rng& rng, Eigen::Index d) { return complex_gaussian(rng, d, 1).col(0); }

Matrix random_psd(Rng& rng, Eigen::Index d, Eigen::Index rank) {
  if (rank == 0) return Matrix::Zero(d, d);
  const Matrix a = complex_gaussian(rng, rank, d);
  return hermitian_part(a.adjoint() * a) / static_cast<double>(d);
}

Matrix random_hermitian(Rng& rng, Eigen::Index n) {
  const Matrix a = complex_gaussian(rng, n, n);
  return hermitian_part(a);
}

Matrix random_unitary(Rng& rng, Eigen::Index d) {
  Eigen::HouseholderQR<Matrix> qr(complex_gaussian(rng, d, d));
  return qr.householderQ() * Matrix::Identity(d, d);
}

AtomicOperatorMeasure random_measure(Rng& rng, const MeasureCaps& caps, bool force_kernel) {
  const Eigen::Index lo_dim = force_kernel ? 2 : 1;
  const Eigen::Index d = rng.integer(lo_dim, std::max(lo_dim, caps.max_dim));
  const auto count = static_cast<std::size_t>(rng.integer(1, static_cast<std::int64_t>(caps.max_atoms)));
  const std::vector<double> lambdas = spaced_locations(rng, count, -5.0, 5.0, 0.05);

  Matrix support = Matrix::Identity(d, d);
  if (force_kernel) {
    const Eigen::Index kernel = rng.integer(1, d - 1);
    support = random_unitary(rng, d).leftCols(d - kernel);
  }
  const Eigen::Index s = support.cols();
  std::vector<std::pair<double, Matrix>> atoms;
  for (double lambda : lambdas) {
    const Matrix w = random_psd(rng, s, rng.integer(1, s));
    atoms.emplace_back(lambda, hermitian_part(support * w * support.adjoint()));
  }
  return AtomicOperatorMeasure::create(d, atoms);
}

AtomicOperatorMeasure random_integer_measure(Rng& rng, const MeasureCaps& caps) {
  const Eigen::Index d = rng.integer(1, caps.max_dim);
  const auto count = static_cast<std::size_t>(rng.integer(1, static_cast<std::int64_t>(caps.max_atoms)));
  std::vector<std::pair<double, Matrix>> atoms;
  for (std::size_t j = 0; j < count; ++j) {
    Matrix a(rng.integer(1, d), d);
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      for (Eigen::Index r = 0; r < a.rows(); ++r) {
        a(r, c) = Complex(static_cast<double>(rng.integer(-3, 3)), static_cast<double>(rng.integer(-3, 3)));
      }
    }
    if (a.norm() == 0.0) a(0, 0) = 1.0;
    atoms.emplace_back(static_cast<double>(rng.integer(-5, 5)), a.adjoint() * a);
  }
  return AtomicOperatorMeasure::create(d, atoms);
}

BorelSet random_borel_set(Rng& rng) {
  const auto count = rng.integer(0, 3);
  std::vector<BorelSet::Interval> pieces;
  for (std::int64_t i = 0; i < count; ++i) {
    double a = rng.uniform(-6.0, 6.0);
    double b = rng.uniform(-6.0, 6.0);
    if (a > b) std::swap(a, b);
    if (rng.uniform() < 0.1) a = -kInf;
    if (rng.uniform() < 0.1) b = kInf;
    if (a < b) pieces.push_back({a, b});
  }
  return BorelSet(std::move(pieces));
}

StepFunction random_step_function(Rng& rng, Eigen::Index d) {
  StepFunction u;
  const auto count = rng.integer(1, 4);
  for (std::int64_t i = 0; i < count; ++i) {
    BorelSet set = random_borel_set(rng);
    u.terms.push_back({std::move(set), random_vector(rng, d)});
  }
  return u;
}

PerturbationInstance random_perturbation(Rng& rng, Eigen::Index max_n, Eigen::Index max_k,
                                         bool require_generating) {
  for (;;) {
    const Eigen::Index n = rng.integer(1, max_n);
    const Eigen::Index k = rng.integer(1, std::min(max_k, n));
    auto inst = PerturbationInstance::create(random_hermitian(rng, n), complex_gaussian(rng, n, k),
                                             random_hermitian(rng, k));
    if (!require_generating || generating_check(inst).is_generating) return inst;
  }
}

MatrixHerglotz random_herglotz(Rng& rng, Eigen::Index max_k, std::size_t max_atoms) {
  const Eigen::Index k = rng.integer(1, max_k);
  const Matrix c = random_hermitian(rng, k);
  const Matrix d = rng.uniform() < 1.0 / 3.0 ? Matrix::Zero(k, k) : random_psd(rng, k, rng.integer(1, k));
  const auto count = static_cast<std::size_t>(rng.integer(1, static_cast<std::int64_t>(max_atoms)));
  const std::vector<double> lambdas = spaced_locations(rng, count, -5.0, 5.0, 0.25);
  std::vector<std::pair<double, Matrix>> atoms;
  for (double lambda : lambdas) atoms.emplace_back(lambda, random_psd(rng, k, rng.integer(1, k)));
  return MatrixHerglotz::create(c, d, AtomicOperatorMeasure::create(k, atoms), HerglotzForm::Nevanlinna);
}

FiniteSemiMetric random_semimetric(Rng& rng, std::size_t max_n) {
  const auto top = static_cast<std::int64_t>(max_n);
  const auto n = static_cast<Eigen::Index>(rng.integer(std::min<std::int64_t>(2, top), top));
  // Planted classes: zero distance inside a class, integer weights across.
  const std::int64_t classes = rng.integer(std::min<std::int64_t>(2, n), n);
  std::vector<std::int64_t> label(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < label.size(); ++i) {
    label[i] = static_cast<std::int64_t>(i) < classes ? static_cast<std::int64_t>(i) : rng.integer(0, classes - 1);
  }
  for (std::size_t i = label.size(); i > 1; --i) {
    std::swap(label[i - 1], label[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(i) - 1))]);
  }
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const bool same = label[static_cast<std::size_t>(i)] == label[static_cast<std::size_t>(j)];
      const double v = same ? 0.0 : static_cast<double>(rng.integer(1, 20));
      w(i, j) = w(j, i) = v;
    }
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) w(i, j) = std::min(w(i, j), w(i, k) + w(k, j));
    }
  }
  return validate_semimetric(w);
}

std::pair<Matrix, Matrix> random_ordered_pair(Rng& rng, Eigen::Index max_dim) {
  const Eigen::Index d = rng.integer(1, max_dim);
  const Matrix f = random_psd(rng, d, rng.integer(0, d));
  const Matrix r = random_psd(rng, d, rng.integer(0, d));
  return {f, hermitian_part(f + r)};
}

}  // namespace gen

}  // namespace opmodel
