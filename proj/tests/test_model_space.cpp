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

#include <cmath>

#include "opmodel/random.hpp"
#include "test_util.hpp"

using namespace opmodel;
using testutil::diff;
using testutil::kind_of;
using testutil::mat;
using testutil::vec;

namespace {

AtomicOperatorMeasure two_atoms() {
  return AtomicOperatorMeasure::create(2, {{0.0, mat({{1, 0}, {0, 0}})}, {1.0, mat({{1, 1}, {1, 1}})}});
}

AtomicOperatorMeasure degenerate() { return AtomicOperatorMeasure::create(2, {{0.0, mat({{4, 0}, {0, 0}})}}); }

const Vector e1 = vec({1, 0});
const Vector e2 = vec({0, 1});

}  // namespace

TEST_CASE("build_model fibers") {
  const ModelSpace a = build_model(two_atoms());
  CHECK(a.mu.masses == std::vector<double>{0.5, 0.75});
  CHECK(diff(a.fibers[0].gram.matrix(), mat({{2, 0}, {0, 0}})) < 1e-15);
  CHECK(diff(a.fibers[1].gram.matrix(), 4.0 / 3.0 * mat({{1, 1}, {1, 1}})) < 1e-15);
  CHECK(a.fibers[0].quotient.rank == 1);
  CHECK(a.fibers[1].quotient.rank == 1);
  CHECK(a.total_dim == 2);

  const ModelSpace b = build_model(AtomicOperatorMeasure::create(2, {{0.0, Matrix::Identity(2, 2)}}));
  CHECK(diff(b.fibers[0].gram.matrix(), 4.0 / 3.0 * Matrix::Identity(2, 2)) < 1e-15);
  CHECK(b.total_dim == 2);

  const ModelSpace c = build_model(AtomicOperatorMeasure::create(1, {{0.0, mat({{2}})}}));
  // μ = 2^{-1}·2 = 1, so Φ = [2].
  CHECK(c.mu.masses[0] == 1.0);
  CHECK(std::abs(c.fibers[0].gram.matrix()(0, 0) - 2.0) < 1e-15);
  CHECK(c.total_dim == 1);

  CHECK(kind_of([] { build_model(two_atoms(), mat({{1, 1}, {0, 1}})); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("inner products") {
  const ModelSpace ms = build_model(two_atoms());
  const ModelVector f = lambda_embed(ms, e1);
  CHECK(std::abs(inner(ms, f, f) - 2.0) < 1e-15);
  CHECK(inner(ms, zero_vector(ms), f) == Complex(0.0));
  CHECK(std::abs(inner(ms, f, f, weight_w1) - 3.0) < 1e-15);
  // Linear in the second argument.
  const Complex a(0.3, -1.2);
  ModelVector g = lambda_embed(ms, a * e2);
  CHECK(std::abs(inner(ms, f, g) - a * inner(ms, f, lambda_embed(ms, e2))) < 1e-15);
  CHECK(kind_of([&] { inner(ms, f, f, [](double) { return 0.0; }); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { inner(ms, f, ModelVector{{e1}}); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("lambda_embed and kernel") {
  const ModelSpace deg = build_model(degenerate());
  CHECK(norm_squared(deg, lambda_embed(deg, e2)) == 0.0);
  const ModelSpace ms = build_model(two_atoms());
  CHECK(norm_squared(ms, lambda_embed(ms, vec({0, 0}))) == 0.0);
  CHECK(std::abs(norm_squared(ms, lambda_embed(ms, e1)) - 2.0) < 1e-15);
}

TEST_CASE("gram_lambda") {
  CHECK(diff(gram_lambda(build_model(two_atoms()), Matrix::Identity(2, 2)), mat({{2, 1}, {1, 1}})) < 1e-15);
  CHECK(diff(gram_lambda(build_model(AtomicOperatorMeasure::create(2, {{0.0, Matrix::Identity(2, 2)}})),
                         Matrix::Identity(2, 2)),
             Matrix::Identity(2, 2)) < 1e-15);
  const ModelSpace deg = build_model(degenerate());
  CHECK(diff(gram_lambda(deg, Matrix::Identity(2, 2)), mat({{4, 0}, {0, 0}})) < 1e-15);
  CHECK(std::abs(lambda_norm(deg) - 2.0) < 1e-15);
}

TEST_CASE("verify_parseval") {
  const ModelSpace ms = build_model(two_atoms());
  CHECK(verify_parseval(ms, BorelSet::real_line(), e1, e2, 1e-12).pass);
  const Report r = verify_parseval(ms, BorelSet::interval(-1, 0.5), e1, e1, 1e-12);
  CHECK(r.pass);
  CHECK(std::abs(inner(ms, restrict_to(ms, BorelSet::interval(-1, 0.5), lambda_embed(ms, e1)), lambda_embed(ms, e1)) -
                 1.0) < 1e-15);
  CHECK(verify_parseval(ms, BorelSet::empty_set(), e1, e1, 0.0).residual == 0.0);
}

TEST_CASE("s_operator") {
  const ModelSpace ms = build_model(two_atoms());
  CHECK(s_operator(ms, BorelSet::real_line()) == Matrix::Identity(2, 2));
  CHECK(s_operator(ms, BorelSet::empty_set()).norm() == 0.0);

  const ModelSpace deg = build_model(degenerate());
  // K₀ = span e₂ keeps the identity block when Σ₁(∅) = 0.
  CHECK(diff(s_operator(deg, BorelSet::empty_set()), mat({{0, 0}, {0, 1}})) < 1e-15);

  // T^{-1/2}·diag(1,0)^{1/2} for T = [[2,1],[1,1]], computed with scipy.linalg.sqrtm.
  const Matrix expect = mat({{0.8944271909999159, 0}, {-0.4472135954999579, 0}});
  CHECK(diff(s_operator(ms, BorelSet::interval(-1, 0.5)), expect) < 1e-14);
  CHECK(verify_s_intertwining(ms, BorelSet::interval(-1, 0.5), 1e-12).pass);
  CHECK(verify_s_contraction(ms, BorelSet::interval(-1, 0.5), 1e-12).pass);
}

TEST_CASE("multiplication covariance") {
  const ModelSpace ms = build_model(two_atoms());
  CHECK(verify_multiplication_covariance(ms, BorelSet::real_line(), e1, 1e-12).residual == 0.0);
  CHECK(verify_multiplication_covariance(ms, BorelSet::empty_set(), e1, 1e-12).residual == 0.0);

  // Only λ = 1 in B. No vector S(B)e₁ reproduces χ_B·Λe₁ pointwise here;
  // scipy gives the squared L² distance 0.10263340389897241 for the
  // principal-root S(B), so the pointwise form fails while the Gram form holds.
  const BorelSet b = BorelSet::interval(0.5, 2);
  const Report pointwise = verify_multiplication_covariance(ms, b, e1, 1e-10);
  const double t_norm = (3.0 + std::sqrt(5.0)) / 2.0;
  CHECK(pointwise.residual == doctest::Approx(0.10263340389897241 / t_norm).epsilon(1e-12));
  CHECK_FALSE(pointwise.pass);
  CHECK(verify_covariance_gram(ms, b, 1e-12).pass);
}

TEST_CASE("step_span_dimension") {
  CHECK(step_span_dimension(build_model(two_atoms())) == 2);
  CHECK(step_span_dimension(build_model(AtomicOperatorMeasure::create(3, {{0.0, Matrix::Identity(3, 3)}}))) == 3);
  CHECK(step_span_dimension(build_model(degenerate())) == 1);
}

TEST_CASE("multiplication_operator") {
  const MultiplicationOperator h = multiplication_operator(build_model(two_atoms()));
  CHECK(diff(h.h, mat({{0, 0}, {0, 1}})) == 0.0);
  CHECK(diff(h.projector_at(0.5), mat({{1, 0}, {0, 0}})) == 0.0);
  CHECK(diff(h.projector_at(kInf), Matrix::Identity(2, 2)) == 0.0);
  CHECK(h.projector_at(-1.0).norm() == 0.0);
  const MultiplicationOperator five =
      multiplication_operator(build_model(AtomicOperatorMeasure::create(2, {{5.0, Matrix::Identity(2, 2)}})));
  CHECK(diff(five.h, 5.0 * Matrix::Identity(2, 2)) == 0.0);
}

TEST_CASE("berezanskii_norm") {
  const ModelSpace ms = build_model(two_atoms());
  const StepFunction u{{{BorelSet::interval(-1, 0.5), e1}}};
  CHECK(std::abs(berezanskii_norm(ms, u) - 1.0) < 1e-15);
  CHECK(std::abs(norm_squared(ms, to_model_vector(ms, u)) - 1.0) < 1e-15);
  CHECK(berezanskii_norm(ms, StepFunction{}) == 0.0);
  CHECK(std::abs(berezanskii_norm(ms, StepFunction{{{BorelSet::real_line(), e1}}}) - 2.0) < 1e-15);
}

TEST_CASE("verify_uniqueness") {
  const auto s = two_atoms();
  CHECK(verify_uniqueness(s, Matrix::Identity(2, 2), Matrix::Identity(2, 2), 0.0).residual == 0.0);
  const Matrix swap = mat({{0, 1}, {1, 0}});
  // Swapped basis: μ = (1/4, 3/4).
  CHECK(control_measure(s, swap).masses == std::vector<double>{0.25, 0.75});
  CHECK(verify_uniqueness(s, Matrix::Identity(2, 2), swap, 1e-14).pass);
  for (std::uint64_t i = 0; i < 20; ++i) {
    Rng rng(31, i, field::kBasis);
    const auto sigma = gen::random_measure(rng, {6, 8});
    const Matrix q = gen::random_unitary(rng, sigma.dim());
    const Report r = verify_uniqueness(sigma, Matrix::Identity(sigma.dim(), sigma.dim()), q, 1e-11);
    CHECK(r.pass);
    CHECK(r.failure == ErrorKind::UniquenessViolation);
  }
}

TEST_CASE("gelfand_kostyuchenko_check") {
  const auto s = two_atoms();
  CHECK(gelfand_kostyuchenko_check(s, Matrix::Identity(2, 2), 1e-14).pass);
  CHECK(gelfand_kostyuchenko_check(s, mat({{1, 0}, {0, 2}}), 1e-14).pass);
  CHECK(kind_of([&] { gelfand_kostyuchenko_check(s, mat({{1, 1}, {1, 1}}), 1e-12); }) == ErrorKind::InvalidArgument);
  for (std::uint64_t i = 0; i < 20; ++i) {
    Rng rng(32, i, field::kBasis);
    const auto sigma = gen::random_measure(rng, {6, 8}, i % 2 == 1);
    const Eigen::Index d = sigma.dim();
    const Matrix k = gen::complex_gaussian(rng, d, d) + 2.0 * Matrix::Identity(d, d);
    CHECK(gelfand_kostyuchenko_check(sigma, k, 1e-8, {gen::random_borel_set(rng)}).pass);
  }
}

TEST_CASE("weighted_embed") {
  const ModelSpace ms = build_model(two_atoms());
  CHECK(std::abs(norm_squared(ms, weighted_embed(ms, e1), weight_w1) - 2.0) < 1e-14);
  CHECK(norm_squared(ms, weighted_embed(ms, vec({0, 0})), weight_w1) == 0.0);
  const ModelSpace deg = build_model(degenerate());
  CHECK(norm_squared(deg, weighted_embed(deg, e2), weight_w1) == 0.0);
}

TEST_CASE("model identities on seeded measures") {
  for (std::uint64_t i = 0; i < 200; ++i) {
    Rng rng(33, i, field::kMeasure);
    const auto sigma = gen::random_measure(rng, {6, 8}, i % 2 == 1);
    const Eigen::Index d = sigma.dim();
    const ModelSpace ms = build_model(sigma);
    const double tnorm = ms.total.norm2();
    CHECK(verify_gram_lambda(ms, Matrix::Identity(d, d), 1e-10).pass);
    CHECK(step_span_dimension(ms) == ms.total_dim);

    for (Eigen::Index c = 0; c < ms.split.k0.cols(); ++c) {
      CHECK(norm_squared(ms, lambda_embed(ms, ms.split.k0.col(c))) <= 1e-12 * tnorm);
    }
    const double t1_min = ms.split.t1.eigenvalues().size() ? ms.split.t1.eigenvalues().minCoeff() : 0.0;
    for (Eigen::Index c = 0; c < ms.split.k1.cols(); ++c) {
      CHECK(norm_squared(ms, lambda_embed(ms, ms.split.k1.col(c))) >= t1_min - 1e-10);
    }

    for (int r = 0; r < 10; ++r) {
      const BorelSet b = gen::random_borel_set(rng);
      CHECK(verify_parseval(ms, b, gen::random_vector(rng, d), gen::random_vector(rng, d), 1e-10).pass);
      CHECK(verify_s_intertwining(ms, b, 1e-9).pass);
      CHECK(verify_covariance_gram(ms, b, 1e-10).pass);
    }
    const StepFunction u = gen::random_step_function(rng, d);
    const double bn = berezanskii_norm(ms, u);
    CHECK(std::abs(bn - norm_squared(ms, to_model_vector(ms, u))) <= 1e-12 * std::max(bn, 1e-300));
  }
}
