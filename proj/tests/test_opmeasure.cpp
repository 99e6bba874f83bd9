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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "opmodel/random.hpp"
#include "test_util.hpp"

using namespace opmodel;
using testutil::diff;
using testutil::kind_of;
using testutil::mat;

namespace {

AtomicOperatorMeasure two_atoms() {
  return AtomicOperatorMeasure::create(2, {{0.0, mat({{1, 0}, {0, 0}})}, {1.0, mat({{1, 1}, {1, 1}})}});
}

AtomicOperatorMeasure kernel_measure() {
  return AtomicOperatorMeasure::create(2, {{0.0, mat({{1, 0}, {0, 0}})}, {2.0, mat({{3, 0}, {0, 0}})}});
}

BorelSet complement(const BorelSet& a) {
  std::vector<BorelSet::Interval> out;
  double start = -kInf;
  for (const auto& iv : a.intervals()) {
    if (start < iv.lo) out.push_back({start, iv.lo});
    start = iv.hi;
  }
  if (start < kInf) out.push_back({start, kInf});
  return BorelSet(out);
}

}  // namespace

TEST_CASE("Borel sets normalize") {
  const BorelSet b({{2, 3}, {0, 1}, {1, 1.5}});
  REQUIRE(b.intervals().size() == 2);
  CHECK(b.intervals()[0] == BorelSet::Interval{0, 1.5});
  CHECK(b.contains(1.5));
  CHECK_FALSE(b.contains(0.0));
  CHECK(BorelSet::real_line().contains(-1e300));
  CHECK(b.unite(BorelSet::interval(1.5, 2)) == BorelSet::interval(0, 3));
  CHECK(b.intersect(BorelSet::interval(1, 2.5)) == BorelSet({{1, 1.5}, {2, 2.5}}));
  CHECK(BorelSet::empty_set().intersect(b).empty());
  CHECK(kind_of([] { BorelSet::interval(1, 1); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("evaluate") {
  const auto s = two_atoms();
  CHECK(diff(evaluate(s, BorelSet::interval(-1, 0.5)).matrix(), mat({{1, 0}, {0, 0}})) == 0.0);
  CHECK(evaluate(s, BorelSet::empty_set()).matrix().norm() == 0.0);
  CHECK(diff(evaluate(s, BorelSet::real_line()).matrix(), mat({{2, 1}, {1, 1}})) == 0.0);
}

TEST_CASE("total") {
  CHECK(diff(total(two_atoms()).matrix(), mat({{2, 1}, {1, 1}})) == 0.0);
  const auto single = AtomicOperatorMeasure::create(2, {{0.0, Matrix::Identity(2, 2)}});
  CHECK(diff(total(single).matrix(), Matrix::Identity(2, 2)) == 0.0);
  const PsdMatrix t = total(kernel_measure());
  CHECK(diff(t.matrix(), mat({{4, 0}, {0, 0}})) == 0.0);
  CHECK(t.rank() == 1);
}

TEST_CASE("measure construction") {
  CHECK(kind_of([] { AtomicOperatorMeasure::create(2, {{0.0, Matrix::Zero(2, 2)}}); }) == ErrorKind::InvalidArgument);
  const auto merged =
      AtomicOperatorMeasure::create(1, {{1.0, mat({{1}})}, {0.0, mat({{2}})}, {1.0, mat({{3}})}});
  REQUIRE(merged.size() == 2);
  CHECK(merged.atoms()[0].lambda == 0.0);
  CHECK(merged.atoms()[1].weight.matrix()(0, 0) == Complex(4.0));
  CHECK(kind_of([] { AtomicOperatorMeasure::create(2, {{0.0, mat({{1}})}}); }) == ErrorKind::DimensionMismatch);
  CHECK(kind_of([] { AtomicOperatorMeasure::create(2, {{0.0, mat({{0, 1}, {1, 0}})}}); }) == ErrorKind::NotPsd);
}

TEST_CASE("control_measure") {
  const ScalarMeasure mu = control_measure(two_atoms(), Matrix::Identity(2, 2));
  CHECK(mu.masses[0] == 0.5);
  CHECK(mu.masses[1] == 0.75);
  const auto single = AtomicOperatorMeasure::create(2, {{5.0, Matrix::Identity(2, 2)}});
  CHECK(control_measure(single, Matrix::Identity(2, 2)).masses[0] == 0.75);
  // A broken "basis" can miss a nonzero atom.
  CHECK(kind_of([] {
          control_measure(AtomicOperatorMeasure::create(2, {{0.0, mat({{0, 0}, {0, 1}})}}), mat({{1, 1}, {0, 0}}));
        }) == ErrorKind::ZeroAtom);
}

TEST_CASE("kernel_split") {
  const KernelSplit a = kernel_split(validate_psd(mat({{4, 0}, {0, 0}})));
  REQUIRE(a.k0.cols() == 1);
  CHECK(std::abs(std::abs(a.k0(1, 0)) - 1.0) < 1e-15);
  CHECK(std::abs(std::abs(a.k1(0, 0)) - 1.0) < 1e-15);
  CHECK(std::abs(a.t1.matrix()(0, 0) - 4.0) < 1e-14);

  const KernelSplit b = kernel_split(validate_psd(Matrix::Identity(2, 2)));
  CHECK(b.k0.cols() == 0);
  CHECK(diff(b.t1.matrix(), Matrix::Identity(2, 2)) < 1e-14);

  CHECK(kernel_split(validate_psd(mat({{2, 1}, {1, 1}}))).k0.cols() == 0);
}

TEST_CASE("verify_kernel_inclusion") {
  const auto s = kernel_measure();
  const Report r = verify_kernel_inclusion(s, kernel_split(total(s)), 1e-12);
  CHECK(r.pass);
  CHECK(r.residual == 0.0);
  CHECK(verify_kernel_inclusion(two_atoms(), kernel_split(total(two_atoms())), 1e-12).pass);

  const auto corrupt = AtomicOperatorMeasure::create(2, {{0.0, mat({{1, 0}, {0, 1e-3}})}});
  const KernelSplit split = kernel_split(validate_psd(mat({{4, 0}, {0, 0}})));
  const Report bad = verify_kernel_inclusion(corrupt, split, 1e-12);
  CHECK_FALSE(bad.pass);
  CHECK(bad.residual == doctest::Approx(1e-3));
  CHECK(kind_of([&] { bad.require(); }) == ErrorKind::InclusionViolation);
}

TEST_CASE("block_check") {
  const auto s = kernel_measure();
  const Report r = block_check(s, kernel_split(total(s)), 1e-12);
  CHECK(r.pass);
  CHECK(r.residual == 0.0);
  CHECK(block_check(two_atoms(), kernel_split(total(two_atoms())), 1e-12).pass);

  Rng rng(21, 0, field::kMeasure);
  std::vector<std::pair<double, Matrix>> atoms;
  for (double lambda : {-1.0, 0.5, 2.0}) {
    Matrix w = Matrix::Zero(3, 3);
    w.topLeftCorner(2, 2) = gen::random_psd(rng, 2, 2);
    atoms.emplace_back(lambda, w);
  }
  const auto supported = AtomicOperatorMeasure::create(3, atoms);
  const KernelSplit split = kernel_split(total(supported));
  CHECK(split.k0.cols() == 1);
  CHECK(block_check(supported, split, 1e-12, {BorelSet::interval(0, 3)}).pass);

  const auto corrupt = AtomicOperatorMeasure::create(2, {{0.0, mat({{1, 0.1}, {0.1, 0.02}})}});
  CHECK_FALSE(block_check(corrupt, kernel_split(validate_psd(mat({{4, 0}, {0, 0}}))), 1e-12).pass);
}

TEST_CASE("additivity is exact for integer weights") {
  for (std::uint64_t i = 0; i < 200; ++i) {
    Rng rng(22, i, field::kMeasure);
    const auto sigma = gen::random_integer_measure(rng, {6, 8});
    const double cut = rng.uniform(-6, 6);
    const BorelSet b1 = BorelSet::interval(-kInf, cut);
    const BorelSet b2 = gen::random_borel_set(rng).intersect(BorelSet::interval(cut, kInf));
    CHECK((evaluate_matrix(sigma, b1.unite(b2)) - evaluate_matrix(sigma, b1) - evaluate_matrix(sigma, b2)).norm() ==
          0.0);
  }
}

TEST_CASE("additivity and monotone bound on seeded measures") {
  for (std::uint64_t i = 0; i < 200; ++i) {
    Rng rng(23, i, field::kMeasure);
    const auto sigma = gen::random_measure(rng, {6, 8}, i % 2 == 1);
    const BorelSet a = gen::random_borel_set(rng);
    const BorelSet b = gen::random_borel_set(rng);
    const BorelSet b_only = b.intersect(BorelSet::real_line());
    const double scale = total(sigma).norm2();
    const BorelSet rest = b_only.intersect(complement(a));
    CHECK((evaluate_matrix(sigma, a.unite(rest)) - evaluate_matrix(sigma, a) - evaluate_matrix(sigma, rest)).norm() <=
          1e-14 * scale);
    CHECK(verify_monotone_bound(sigma, {a, b, rest}, 1e-12).pass);

    const ScalarMeasure mu = control_measure(sigma, Matrix::Identity(sigma.dim(), sigma.dim()));
    for (double m : mu.masses) CHECK(m > 0.0);

    const KernelSplit split = kernel_split(total(sigma));
    CHECK(diff(split.k1.adjoint() * total(sigma).matrix() * split.k1, split.t1.matrix()) <= 1e-12 * scale);
    CHECK((total(sigma).matrix() * split.k0).norm() <= 1e-10 * total(sigma).matrix().norm());
    if (i % 2 == 1) CHECK(split.k0.cols() >= 1);
    CHECK(verify_kernel_inclusion(sigma, split, 1e-12).pass);
    CHECK(block_check(sigma, split, 1e-12, {a, b}).pass);
  }
}
