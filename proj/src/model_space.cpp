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

#include "opmodel/model_space.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace opmodel {

namespace {

constexpr double kTiny = std::numeric_limits<double>::min();

void check_conforming(const ModelSpace& ms, const ModelVector& f) {
  if (f.per_atom.size() != ms.fibers.size()) {
    throw Error(ErrorKind::DimensionMismatch, "model vector has wrong number of atoms");
  }
  for (const auto& v : f.per_atom) {
    if (v.size() != ms.dim()) {
      throw Error(ErrorKind::DimensionMismatch, "model vector representative has wrong length");
    }
  }
}

void check_vector(const ModelSpace& ms, const Vector& v) {
  if (v.size() != ms.dim()) throw Error(ErrorKind::DimensionMismatch, "vector length differs from d");
}

bool covers_all_atoms(const ModelSpace& ms, const BorelSet& b) {
  return std::all_of(ms.fibers.begin(), ms.fibers.end(),
                     [&](const Fiber& f) { return b.contains(f.lambda); });
}

}  // namespace

Vector StepFunction::at(double lambda, Eigen::Index dim) const {
  Vector out = Vector::Zero(dim);
  for (const auto& term : terms) {
    if (term.xi.size() != dim) {
      throw Error(ErrorKind::DimensionMismatch, "step function coefficient has wrong length");
    }
    if (term.set.contains(lambda)) out += term.xi;
  }
  return out;
}

double weight_w1(double lambda) { return 1.0 + lambda * lambda; }

ModelSpace build_model(const AtomicOperatorMeasure& sigma, const Matrix& onb, double tol) {
  if (onb.rows() != sigma.dim() || onb.cols() != sigma.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "basis must be d × d");
  }
  if (orthonormality_defect(onb) > 1e-8) {
    throw Error(ErrorKind::InvalidArgument, "basis is not orthonormal");
  }
  ScalarMeasure mu = control_measure(sigma, onb);

  std::vector<Fiber> fibers;
  Eigen::Index total_dim = 0;
  for (std::size_t j = 0; j < sigma.size(); ++j) {
    const auto& atom = sigma.atoms()[j];
    PsdMatrix gram = validate_psd(atom.weight.matrix() / mu.masses[j], tol);
    RankFactorization q = seminorm_quotient(gram);
    total_dim += q.rank;
    fibers.push_back(Fiber{atom.lambda, mu.masses[j], std::move(gram), std::move(q)});
  }

  PsdMatrix t = validate_psd(evaluate_matrix(sigma, BorelSet::real_line()), tol);
  KernelSplit split = kernel_split(t);
  return ModelSpace{sigma, onb, std::move(mu), std::move(fibers), std::move(t), std::move(split),
                    total_dim};
}

ModelSpace build_model(const AtomicOperatorMeasure& sigma, double tol) {
  return build_model(sigma, Matrix::Identity(sigma.dim(), sigma.dim()), tol);
}

Complex inner(const ModelSpace& ms, const ModelVector& f, const ModelVector& g, const WeightFn& w) {
  check_conforming(ms, f);
  check_conforming(ms, g);
  Complex sum = 0.0;
  for (std::size_t j = 0; j < ms.fibers.size(); ++j) {
    const auto& fiber = ms.fibers[j];
    double weight = 1.0;
    if (w) {
      weight = w(fiber.lambda);
      if (!(weight > 0.0)) throw Error(ErrorKind::InvalidArgument, "weight must be strictly positive");
    }
    sum += weight * fiber.mu * f.per_atom[j].dot(fiber.gram.matrix() * g.per_atom[j]);
  }
  return sum;
}

double norm_squared(const ModelSpace& ms, const ModelVector& f, const WeightFn& w) {
  return std::max(0.0, inner(ms, f, f, w).real());
}

Vector coordinates(const ModelSpace& ms, const ModelVector& f) {
  check_conforming(ms, f);
  Vector out(ms.total_dim);
  Eigen::Index offset = 0;
  for (std::size_t j = 0; j < ms.fibers.size(); ++j) {
    const auto& fiber = ms.fibers[j];
    const Eigen::Index r = fiber.quotient.rank;
    out.segment(offset, r) = std::sqrt(fiber.mu) * fiber.quotient.coordinates(f.per_atom[j]);
    offset += r;
  }
  return out;
}

ModelVector zero_vector(const ModelSpace& ms) {
  return ModelVector{std::vector<Vector>(ms.fibers.size(), Vector::Zero(ms.dim()))};
}

ModelVector operator-(const ModelVector& a, const ModelVector& b) {
  if (a.per_atom.size() != b.per_atom.size()) {
    throw Error(ErrorKind::DimensionMismatch, "model vectors differ in atom count");
  }
  ModelVector out = a;
  for (std::size_t j = 0; j < out.per_atom.size(); ++j) out.per_atom[j] -= b.per_atom[j];
  return out;
}

ModelVector lambda_embed(const ModelSpace& ms, const Vector& xi) {
  check_vector(ms, xi);
  return ModelVector{std::vector<Vector>(ms.fibers.size(), xi)};
}

ModelVector restrict_to(const ModelSpace& ms, const BorelSet& b, const ModelVector& f) {
  check_conforming(ms, f);
  ModelVector out = f;
  for (std::size_t j = 0; j < ms.fibers.size(); ++j) {
    if (!b.contains(ms.fibers[j].lambda)) out.per_atom[j].setZero();
  }
  return out;
}

Matrix gram_lambda(const ModelSpace& ms, const Matrix& onb) {
  const Eigen::Index n = onb.cols();
  std::vector<ModelVector> embedded;
  embedded.reserve(n);
  for (Eigen::Index m = 0; m < n; ++m) embedded.push_back(lambda_embed(ms, onb.col(m)));
  Matrix g(n, n);
  for (Eigen::Index m = 0; m < n; ++m) {
    for (Eigen::Index k = 0; k < n; ++k) g(m, k) = inner(ms, embedded[m], embedded[k]);
  }
  return g;
}

double lambda_norm(const ModelSpace& ms) {
  const Matrix g = gram_lambda(ms, Matrix::Identity(ms.dim(), ms.dim()));
  return std::sqrt(std::max(0.0, validate_psd(g, ms.total.tol()).norm2()));
}

Report verify_gram_lambda(const ModelSpace& ms, const Matrix& onb, double tol) {
  const Matrix expected = onb.adjoint() * ms.total.matrix() * onb;
  const double scale = std::max(ms.total.matrix().norm(), kTiny);
  return Report::make("gram_lambda", (gram_lambda(ms, onb) - expected).norm() / scale, tol);
}

Report verify_parseval(const ModelSpace& ms, const BorelSet& b, const Vector& eta, const Vector& xi,
                       double tol) {
  check_vector(ms, eta);
  check_vector(ms, xi);
  const Complex lhs = eta.dot(evaluate_matrix(ms.sigma, b) * xi);
  Complex rhs = 0.0;
  for (const auto& fiber : ms.fibers) {
    if (b.contains(fiber.lambda)) rhs += fiber.mu * eta.dot(fiber.gram.matrix() * xi);
  }
  const double scale = std::max(eta.norm() * xi.norm() * ms.total.norm2(), kTiny);
  return Report::make("parseval", std::abs(lhs - rhs) / scale, tol);
}

Matrix s_operator(const ModelSpace& ms, const BorelSet& b) {
  const Eigen::Index d = ms.dim();
  if (covers_all_atoms(ms, b)) return Matrix::Identity(d, d);

  const auto& split = ms.split;
  const Matrix sigma1 = split.k1.adjoint() * evaluate_matrix(ms.sigma, b) * split.k1;
  const Matrix root = frac_power(validate_psd(sigma1, ms.total.tol()), 0.5).matrix();
  const Matrix t1_inv_root = pinv_power(split.t1, 0.5).matrix();
  return split.k0 * split.k0.adjoint() + split.k1 * (t1_inv_root * root) * split.k1.adjoint();
}

Report verify_s_intertwining(const ModelSpace& ms, const BorelSet& b, double tol) {
  const Matrix t_root = frac_power(ms.total, 0.5).matrix();
  const Matrix sigma_root = frac_power(evaluate(ms.sigma, b), 0.5).matrix();
  const Matrix lhs = t_root * s_operator(ms, b);
  const double scale = std::max(t_root.norm(), kTiny);
  return Report::make("s_intertwining", (lhs - sigma_root).norm() / scale, tol);
}

Report verify_s_contraction(const ModelSpace& ms, const BorelSet& b, double tol) {
  const auto& split = ms.split;
  const Matrix block = split.k1.adjoint() * s_operator(ms, b) * split.k1;
  return Report::make("s_contraction", std::max(0.0, spectral_norm(block) - 1.0), tol);
}

Report verify_multiplication_covariance(const ModelSpace& ms, const BorelSet& b, const Vector& xi,
                                        double tol) {
  check_vector(ms, xi);
  const ModelVector u = lambda_embed(ms, s_operator(ms, b) * xi);
  const ModelVector v = restrict_to(ms, b, lambda_embed(ms, xi));
  const double scale = std::max(xi.squaredNorm() * ms.total.norm2(), kTiny);
  return Report::make("multiplication_covariance", norm_squared(ms, u - v) / scale, tol);
}

Report verify_covariance_gram(const ModelSpace& ms, const BorelSet& b, double tol) {
  const Eigen::Index d = ms.dim();
  const Matrix s = s_operator(ms, b);
  std::vector<ModelVector> moved, cut;
  for (Eigen::Index n = 0; n < d; ++n) {
    const Vector e = Vector::Unit(d, n);
    moved.push_back(lambda_embed(ms, s * e));
    cut.push_back(restrict_to(ms, b, lambda_embed(ms, e)));
  }
  double worst = 0.0;
  for (Eigen::Index m = 0; m < d; ++m) {
    for (Eigen::Index n = 0; n < d; ++n) {
      worst = std::max(worst, std::abs(inner(ms, moved[m], moved[n]) - inner(ms, cut[m], cut[n])));
    }
  }
  const double scale = std::max(ms.total.norm2(), kTiny);
  return Report::make("covariance_gram", worst / scale, tol);
}

Eigen::Index step_span_dimension(const ModelSpace& ms) {
  const Eigen::Index d = ms.dim();
  std::vector<ModelVector> span;
  for (std::size_t j = 0; j < ms.fibers.size(); ++j) {
    for (Eigen::Index n = 0; n < d; ++n) {
      ModelVector v = zero_vector(ms);
      v.per_atom[j] = Vector::Unit(d, n);
      span.push_back(std::move(v));
    }
  }
  const auto count = static_cast<Eigen::Index>(span.size());
  Matrix g(count, count);
  for (Eigen::Index a = 0; a < count; ++a) {
    for (Eigen::Index c = 0; c < count; ++c) g(a, c) = inner(ms, span[a], span[c]);
  }
  return validate_psd(g, ms.total.tol()).rank();
}

Matrix MultiplicationOperator::projector_at(double lambda) const {
  const Eigen::Index n = h.rows();
  Matrix e = Matrix::Zero(n, n);
  for (std::size_t j = 0; j < lambdas.size(); ++j) {
    if (lambdas[j] <= lambda) e.block(offsets[j], offsets[j], ranks[j], ranks[j]).setIdentity();
  }
  return e;
}

MultiplicationOperator multiplication_operator(const ModelSpace& ms) {
  MultiplicationOperator op;
  op.h = Matrix::Zero(ms.total_dim, ms.total_dim);
  Eigen::Index offset = 0;
  for (const auto& fiber : ms.fibers) {
    const Eigen::Index r = fiber.quotient.rank;
    op.h.block(offset, offset, r, r) = Matrix::Identity(r, r) * fiber.lambda;
    op.lambdas.push_back(fiber.lambda);
    op.offsets.push_back(offset);
    op.ranks.push_back(r);
    offset += r;
  }
  return op;
}

double berezanskii_norm(const ModelSpace& ms, const StepFunction& u) {
  double sum = 0.0;
  for (const auto& atom : ms.sigma.atoms()) {
    const Vector v = u.at(atom.lambda, ms.dim());
    sum += v.dot(atom.weight.matrix() * v).real();
  }
  return sum;
}

ModelVector to_model_vector(const ModelSpace& ms, const StepFunction& u) {
  ModelVector out;
  for (const auto& fiber : ms.fibers) out.per_atom.push_back(u.at(fiber.lambda, ms.dim()));
  return out;
}

Report verify_berezanskii(const ModelSpace& ms, const StepFunction& u, double tol) {
  const double riemann = berezanskii_norm(ms, u);
  const double model = norm_squared(ms, to_model_vector(ms, u));
  const double scale = std::max(std::abs(riemann), kTiny);
  return Report::make("berezanskii_isometry", std::abs(riemann - model) / scale, tol);
}

Report verify_uniqueness(const AtomicOperatorMeasure& sigma, const Matrix& onb1, const Matrix& onb2,
                         double tol) {
  const ModelSpace a = build_model(sigma, onb1, sigma.tol());
  const ModelSpace b = build_model(sigma, onb2, sigma.tol());
  double worst = 0.0;
  for (std::size_t j = 0; j < sigma.size(); ++j) {
    const Matrix& weight = sigma.atoms()[j].weight.matrix();
    const Matrix ga = a.fibers[j].mu * a.fibers[j].gram.matrix();
    const Matrix gb = b.fibers[j].mu * b.fibers[j].gram.matrix();
    const double scale = std::max(weight.norm(), kTiny);
    worst = std::max({worst, (ga - gb).norm() / scale, (ga - weight).norm() / scale});
  }
  return Report::make("fiber_uniqueness", worst, tol, ErrorKind::UniquenessViolation);
}

Report gelfand_kostyuchenko_check(const AtomicOperatorMeasure& sigma, const Matrix& kop, double tol,
                                  const std::vector<BorelSet>& probes) {
  const Eigen::Index d = sigma.dim();
  if (kop.rows() != d || kop.cols() != d) {
    throw Error(ErrorKind::DimensionMismatch, "K must be d × d");
  }
  Eigen::FullPivLU<Matrix> lu(kop);
  if (!lu.isInvertible()) throw Error(ErrorKind::InvalidArgument, "K is not invertible");
  const Matrix kinv = lu.inverse();

  const ScalarMeasure mu = control_measure(sigma, Matrix::Identity(d, d));
  std::vector<Matrix> parts;
  for (std::size_t j = 0; j < sigma.size(); ++j) {
    const Matrix& m = sigma.atoms()[j].weight.matrix();
    const PsdMatrix psi = validate_psd(kop.adjoint() * m * kop / mu.masses[j], sigma.tol());
    const Matrix half = frac_power(psi, 0.5).matrix() * kinv;
    parts.push_back(mu.masses[j] * half.adjoint() * half);
  }

  std::vector<BorelSet> sets = probes;
  sets.push_back(BorelSet::real_line());
  for (std::size_t j = 0; j < sigma.size(); ++j) sets.push_back(atom_set(sigma, j));

  const double scale =
      std::max(spectral_norm(evaluate_matrix(sigma, BorelSet::real_line())), kTiny);
  double worst = 0.0;
  for (const auto& b : sets) {
    Matrix rhs = Matrix::Zero(d, d);
    for (std::size_t j = 0; j < sigma.size(); ++j) {
      if (b.contains(sigma.atoms()[j].lambda)) rhs += parts[j];
    }
    worst = std::max(worst, (evaluate_matrix(sigma, b) - rhs).norm() / scale);
  }
  return Report::make("gelfand_kostyuchenko", worst, tol);
}

ModelVector weighted_embed(const ModelSpace& ms, const Vector& v) {
  check_vector(ms, v);
  ModelVector out;
  for (const auto& fiber : ms.fibers) {
    out.per_atom.push_back(v / Complex(fiber.lambda, -1.0));
  }
  return out;
}

}  // namespace opmodel
