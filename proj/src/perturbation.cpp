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

#include "opmodel/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace opmodel {

namespace {

constexpr double kTiny = std::numeric_limits<double>::min();

void check_hermitian(const Matrix& m, double tol, const char* name) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::DimensionMismatch, std::string(name) + " must be square");
  }
  if (!all_finite(m)) throw Error(ErrorKind::InvalidArgument, std::string(name) + " has non-finite entries");
  if ((m - m.adjoint()).norm() > tol * std::max(1.0, m.norm())) {
    throw Error(ErrorKind::NotHermitian, std::string(name) + " is not Hermitian");
  }
}

void check_shift(Complex z) {
  if (z.imag() == 0.0 || !std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw Error(ErrorKind::RealShift, "spectral parameter must lie off the real axis");
  }
}

// Kᴴ P_i K computed as the Gram of V_iᴴK.
Matrix compressed_projector(const Matrix& basis, const Matrix& k) {
  const Matrix a = basis.adjoint() * k;
  return a.adjoint() * a;
}

}  // namespace

PerturbationInstance PerturbationInstance::create(Matrix h0, Matrix kmap, Matrix ell, double tol) {
  check_hermitian(h0, tol, "H0");
  check_hermitian(ell, tol, "L");
  if (!all_finite(kmap)) throw Error(ErrorKind::InvalidArgument, "K has non-finite entries");
  if (kmap.rows() != h0.rows() || kmap.cols() != ell.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "K must be n × k for H0 n × n and L k × k");
  }
  if (kmap.cols() < 1 || kmap.cols() > h0.rows()) {
    throw Error(ErrorKind::InvalidArgument, "need n >= k >= 1");
  }
  return PerturbationInstance{hermitian_part(h0), std::move(kmap), hermitian_part(ell)};
}

Matrix SpectralFamily::at(double lambda) const {
  const Eigen::Index n = dim();
  Matrix e = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    if (eigenvalues[i] <= lambda) e += projectors[i];
  }
  return e;
}

Matrix build_hl(const PerturbationInstance& inst) {
  return hermitian_part(inst.h0 + inst.kmap * inst.ell * inst.kmap.adjoint());
}

SpectralFamily spectral_family(const Matrix& h, double tol) {
  check_hermitian(h, std::max(tol, 1e-12), "H");
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(h));
  const RealVector& vals = es.eigenvalues();
  const Matrix& vecs = es.eigenvectors();
  const Eigen::Index n = vals.size();
  const double gap = tol * (n ? vals.cwiseAbs().maxCoeff() : 0.0);

  SpectralFamily family;
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index end = start + 1;
    while (end < n && vals(end) - vals(end - 1) <= gap) ++end;
    const Eigen::Index count = end - start;
    family.eigenvalues.push_back(vals.segment(start, count).mean());
    family.bases.push_back(vecs.middleCols(start, count));
    family.projectors.push_back(family.bases.back() * family.bases.back().adjoint());
    start = end;
  }
  return family;
}

Report verify_spectral_family(const SpectralFamily& family, const Matrix& h, double tol) {
  const Eigen::Index n = h.rows();
  Matrix sum = Matrix::Zero(n, n);
  Matrix rebuilt = Matrix::Zero(n, n);
  double worst = 0.0;
  for (std::size_t i = 0; i < family.projectors.size(); ++i) {
    const Matrix& p = family.projectors[i];
    sum += p;
    rebuilt += family.eigenvalues[i] * p;
    for (std::size_t j = 0; j < family.projectors.size(); ++j) {
      const Matrix expected = i == j ? p : Matrix::Zero(n, n);
      worst = std::max(worst, (p * family.projectors[j] - expected).norm());
    }
  }
  worst = std::max(worst, (sum - Matrix::Identity(n, n)).norm());
  worst = std::max(worst, (rebuilt - h).norm() / std::max(1.0, h.norm()));
  return Report::make("spectral_family", worst, tol);
}

AtomicOperatorMeasure omega_measure(const PerturbationInstance& inst, double tol) {
  const SpectralFamily family = spectral_family(build_hl(inst), tol);
  std::vector<std::pair<double, Matrix>> atoms;
  for (std::size_t i = 0; i < family.eigenvalues.size(); ++i) {
    atoms.emplace_back(family.eigenvalues[i], compressed_projector(family.bases[i], inst.kmap));
  }
  try {
    return AtomicOperatorMeasure::create(inst.k(), atoms, tol);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidArgument) {
      throw Error(ErrorKind::DegenerateCoupling, "K annihilates every spectral subspace");
    }
    throw;
  }
}

Report verify_omega_total(const PerturbationInstance& inst, double tol) {
  const AtomicOperatorMeasure omega = omega_measure(inst, tol);
  const Matrix expected = inst.kmap.adjoint() * inst.kmap;
  const Matrix got = evaluate_matrix(omega, BorelSet::real_line());
  return Report::make("omega_total", (got - expected).norm() / std::max(expected.norm(), kTiny),
                      tol);
}

MFunction m_function(const PerturbationInstance& inst, Complex z) {
  check_shift(z);
  const Matrix hl = build_hl(inst);
  const Eigen::Index n = inst.n();
  const Matrix shifted = hl - z * Matrix::Identity(n, n);
  const Matrix direct = inst.kmap.adjoint() * shifted.partialPivLu().solve(inst.kmap);

  const SpectralFamily family = spectral_family(hl);
  Matrix stieltjes = Matrix::Zero(inst.k(), inst.k());
  for (std::size_t i = 0; i < family.eigenvalues.size(); ++i) {
    stieltjes += compressed_projector(family.bases[i], inst.kmap) / (family.eigenvalues[i] - z);
  }
  return MFunction{direct, stieltjes};
}

Report verify_m_function(const PerturbationInstance& inst, Complex z, double tol) {
  const MFunction m = m_function(inst, z);
  return Report::make("m_function_stieltjes",
                      (m.direct - m.stieltjes).norm() / std::max(1.0, m.direct.norm()), tol);
}

Report verify_m_herglotz(const PerturbationInstance& inst, Complex z, double tol) {
  const MFunction m = m_function(inst, z);
  const double lowest = min_eigenvalue(imaginary_part(m.direct) / z.imag());
  return Report::make("m_function_herglotz", std::max(0.0, -lowest), tol);
}

GeneratedSubspace generating_check(const PerturbationInstance& inst, double tol) {
  const SpectralFamily family = spectral_family(build_hl(inst), tol);
  const Eigen::Index n = inst.n();
  const Eigen::Index k = inst.k();
  Matrix images(n, k * static_cast<Eigen::Index>(family.projectors.size()));
  for (std::size_t i = 0; i < family.projectors.size(); ++i) {
    images.middleCols(static_cast<Eigen::Index>(i) * k, k) = family.projectors[i] * inst.kmap;
  }
  Eigen::JacobiSVD<Matrix> svd(images, Eigen::ComputeThinU);
  svd.setThreshold(std::sqrt(tol));
  GeneratedSubspace out;
  out.generated_dim = svd.rank();
  out.basis = svd.matrixU().leftCols(out.generated_dim);
  out.is_generating = out.generated_dim == n;
  return out;
}

ModelUnitary model_unitary(const PerturbationInstance& inst, double tol) {
  const Matrix hl = build_hl(inst);
  SpectralFamily family = spectral_family(hl, tol);
  AtomicOperatorMeasure omega = omega_measure(inst, tol);
  ModelSpace model = build_model(omega, tol);

  std::vector<std::size_t> atom_cluster;
  for (const auto& atom : omega.atoms()) {
    const auto it = std::find(family.eigenvalues.begin(), family.eigenvalues.end(), atom.lambda);
    atom_cluster.push_back(static_cast<std::size_t>(it - family.eigenvalues.begin()));
  }

  Matrix u(inst.n(), model.total_dim);
  Eigen::Index offset = 0;
  for (std::size_t j = 0; j < model.fibers.size(); ++j) {
    const Fiber& fiber = model.fibers[j];
    const Matrix image = family.projectors[atom_cluster[j]] * inst.kmap;
    u.middleCols(offset, fiber.quotient.rank) =
        image * fiber.quotient.factor_pinv() / std::sqrt(fiber.mu);
    offset += fiber.quotient.rank;
  }

  GeneratedSubspace generated = generating_check(inst, tol);
  return ModelUnitary{std::move(u), std::move(family), std::move(omega), std::move(model),
                      std::move(atom_cluster), std::move(generated)};
}

DiagonalizationReport verify_diagonalization(const ModelUnitary& mu, const Matrix& hl, double tol) {
  const MultiplicationOperator hat = multiplication_operator(mu.model);
  const Matrix& u = mu.u;
  const Eigen::Index m = u.cols();

  DiagonalizationReport rep;
  rep.n = hl.rows();
  rep.generated_dim = mu.generated.generated_dim;
  rep.generating = mu.generated.is_generating;

  rep.isometry = Report::make("unitary_isometry", orthonormality_defect(u), tol);
  const Matrix gen_proj = mu.generated.basis * mu.generated.basis.adjoint();
  rep.coisometry = Report::make("unitary_onto_generated", (u * u.adjoint() - gen_proj).norm(), tol);

  const double scale = std::max(hl.norm(), kTiny);
  rep.conjugation =
      Report::make("diagonalization", (u.adjoint() * hl * u - hat.h).norm() / scale, tol);

  // Probe the step family at each cluster value and between clusters.
  std::vector<double> probes;
  const auto& vals = mu.family.eigenvalues;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    probes.push_back(vals[i]);
    if (i + 1 < vals.size()) probes.push_back(0.5 * (vals[i] + vals[i + 1]));
  }
  if (!vals.empty()) probes.push_back(vals.front() - 1.0);
  double worst = 0.0;
  for (double lambda : probes) {
    const Matrix pulled = u.adjoint() * mu.family.at(lambda) * u;
    worst = std::max(worst, (pulled - hat.projector_at(lambda)).norm());
  }
  rep.spectral_pullback =
      Report::make("spectral_pullback", worst / std::sqrt(std::max<double>(1.0, double(m))), tol);
  return rep;
}

DiagonalizationReport verify_diagonalization(const PerturbationInstance& inst, double tol,
                                             double cutoff) {
  return verify_diagonalization(model_unitary(inst, cutoff), build_hl(inst), tol);
}

Matrix weyl_titchmarsh(const Matrix& h, const Matrix& nbasis, Complex z) {
  check_shift(z);
  check_hermitian(h, 1e-12, "H");
  if (nbasis.rows() != h.rows()) throw Error(ErrorKind::DimensionMismatch, "N basis length differs from H");
  const Eigen::Index k = nbasis.cols();
  if (k == 0) return Matrix(0, 0);
  if (orthonormality_defect(nbasis) > 1e-8) {
    throw Error(ErrorKind::InvalidArgument, "N basis is not orthonormal");
  }
  const Eigen::Index n = h.rows();
  const Matrix shifted = h - z * Matrix::Identity(n, n);
  const Matrix resolvent = nbasis.adjoint() * shifted.partialPivLu().solve(nbasis);
  return z * Matrix::Identity(k, k) + (1.0 + z * z) * resolvent;
}

std::vector<std::pair<double, Matrix>> weyl_titchmarsh_atoms(const Matrix& h, const Matrix& nbasis,
                                                             double tol) {
  const SpectralFamily family = spectral_family(h, tol);
  std::vector<std::pair<double, Matrix>> atoms;
  for (std::size_t i = 0; i < family.eigenvalues.size(); ++i) {
    const double lambda = family.eigenvalues[i];
    atoms.emplace_back(lambda, (1.0 + lambda * lambda) * compressed_projector(family.bases[i], nbasis));
  }
  return atoms;
}

Report verify_wt_normalization(const Matrix& h, const Matrix& nbasis, double tol) {
  const Eigen::Index k = nbasis.cols();
  Matrix sum = Matrix::Zero(k, k);
  for (const auto& [lambda, w] : weyl_titchmarsh_atoms(h, nbasis)) sum += w / (1.0 + lambda * lambda);
  return Report::make("wt_normalization", (sum - Matrix::Identity(k, k)).norm(), tol);
}

Report verify_wt_representation(const Matrix& h, const Matrix& nbasis, Complex z, double tol) {
  const Matrix direct = weyl_titchmarsh(h, nbasis, z);
  Matrix rep = Matrix::Zero(nbasis.cols(), nbasis.cols());
  for (const auto& [lambda, w] : weyl_titchmarsh_atoms(h, nbasis)) {
    rep += w * (1.0 / (lambda - z) - lambda / (1.0 + lambda * lambda));
  }
  return Report::make("wt_representation", (direct - rep).norm() / std::max(1.0, direct.norm()), tol);
}

}  // namespace opmodel
