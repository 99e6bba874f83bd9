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

#include "opmodel/linops.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace opmodel {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotPsd: return "NotPsd";
    case ErrorKind::OrderViolation: return "OrderViolation";
    case ErrorKind::ZeroAtom: return "ZeroAtom";
    case ErrorKind::InclusionViolation: return "InclusionViolation";
    case ErrorKind::BlockViolation: return "BlockViolation";
    case ErrorKind::IdentityViolation: return "IdentityViolation";
    case ErrorKind::UniquenessViolation: return "UniquenessViolation";
    case ErrorKind::DegenerateCoupling: return "DegenerateCoupling";
    case ErrorKind::RealShift: return "RealShift";
    case ErrorKind::LowerHalfPlane: return "LowerHalfPlane";
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::AxiomViolation: return "AxiomViolation";
    case ErrorKind::IsometryFailure: return "IsometryFailure";
    case ErrorKind::UnsortedSamples: return "UnsortedSamples";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

const Report& Report::require() const {
  if (!pass) {
    std::ostringstream os;
    os.precision(6);
    os << identity << ": residual " << residual << " exceeds tolerance " << tolerance;
    throw Error(failure, os.str());
  }
  return *this;
}

namespace {

constexpr double kPhaseThreshold = 1e-10;

void fix_phases(Matrix& vecs) {
  for (Eigen::Index c = 0; c < vecs.cols(); ++c) {
    for (Eigen::Index r = 0; r < vecs.rows(); ++r) {
      const Complex v = vecs(r, c);
      if (std::abs(v) > kPhaseThreshold) {
        vecs.col(c) *= std::conj(v) / std::abs(v);
        break;
      }
    }
  }
}

// Spectral calculus with an explicit absolute cutoff: eigenvalues <= cutoff
// map to zero, the rest through `fn`.
template <typename Fn>
Matrix spectral_apply(const PsdMatrix& m, double cutoff, Fn fn) {
  const auto& vals = m.eigenvalues();
  const auto& vecs = m.eigenvectors();
  RealVector mapped(vals.size());
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    mapped(i) = vals(i) > cutoff ? fn(vals(i)) : 0.0;
  }
  return vecs * mapped.cast<Complex>().asDiagonal() * vecs.adjoint();
}

void check_alpha(double alpha, double upper) {
  if (!(alpha > 0.0 && alpha <= upper)) {
    std::ostringstream os;
    os << "exponent " << alpha << " outside (0, " << upper << "]";
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
}

void check_order(const PsdMatrix& f, const PsdMatrix& g) {
  if (f.dim() != g.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "F and G differ in dimension");
  }
  const double gap = min_eigenvalue(g.matrix() - f.matrix());
  const double bound = -g.tol() * std::max(1.0, g.norm2());
  if (gap < bound) {
    std::ostringstream os;
    os << "G - F has eigenvalue " << gap << " below " << bound;
    throw Error(ErrorKind::OrderViolation, os.str());
  }
}

}  // namespace

double PsdMatrix::norm2() const {
  return eigenvalues_.size() == 0 ? 0.0 : std::max(0.0, eigenvalues_(0));
}

Eigen::Index PsdMatrix::rank() const {
  const double c = cutoff();
  return static_cast<Eigen::Index>(
      std::count_if(eigenvalues_.begin(), eigenvalues_.end(), [c](double v) { return v > c; }));
}

Matrix RankFactorization::factor_pinv() const {
  RealVector inv = values.cwiseSqrt().cwiseInverse();
  return range_basis * inv.cast<Complex>().asDiagonal();
}

PsdMatrix validate_psd(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "PSD matrix must be square");
  }
  if (!(tol >= 0.0)) throw Error(ErrorKind::InvalidArgument, "negative tolerance");
  if (!all_finite(m)) throw Error(ErrorKind::InvalidArgument, "non-finite matrix entry");

  const double fro = m.norm();
  const double asym = (m - m.adjoint()).norm();
  if (asym > tol * std::max(1.0, fro)) {
    std::ostringstream os;
    os << "asymmetry " << asym << " exceeds " << tol * std::max(1.0, fro);
    throw Error(ErrorKind::NotHermitian, os.str());
  }

  PsdMatrix out;
  out.tol_ = tol;
  out.matrix_ = hermitian_part(m);
  if (m.rows() > 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(out.matrix_);
    out.eigenvalues_ = es.eigenvalues().reverse();
    out.eigenvectors_ = es.eigenvectors().rowwise().reverse();
    fix_phases(out.eigenvectors_);
  } else {
    out.eigenvalues_.resize(0);
    out.eigenvectors_.resize(0, 0);
  }

  const double top = out.eigenvalues_.size() ? std::abs(out.eigenvalues_.cwiseAbs().maxCoeff()) : 0.0;
  if (out.eigenvalues_.size() && out.eigenvalues_.minCoeff() < -tol * top) {
    std::ostringstream os;
    os << "eigenvalue " << out.eigenvalues_.minCoeff() << " below " << -tol * top;
    throw Error(ErrorKind::NotPsd, os.str());
  }
  return out;
}

RankFactorization psd_factorize(const PsdMatrix& m) {
  const Eigen::Index d = m.dim();
  const Eigen::Index r = m.rank();
  const auto& vals = m.eigenvalues();
  const auto& vecs = m.eigenvectors();

  RankFactorization out;
  out.rank = r;
  out.values = vals.head(r);
  out.range_basis = vecs.leftCols(r);
  out.kernel_basis = vecs.rightCols(d - r);
  out.factor = out.values.cwiseSqrt().cast<Complex>().asDiagonal() * out.range_basis.adjoint();
  if (r == 0) out.factor.resize(0, d);
  return out;
}

PsdMatrix frac_power(const PsdMatrix& m, double alpha) {
  check_alpha(alpha, 1.0);
  return validate_psd(spectral_apply(m, m.cutoff(), [alpha](double v) { return std::pow(v, alpha); }),
                      m.tol());
}

PsdMatrix pinv_power(const PsdMatrix& m, double alpha) {
  check_alpha(alpha, 1.0);
  return validate_psd(spectral_apply(m, m.cutoff(), [alpha](double v) { return std::pow(v, -alpha); }),
                      m.tol());
}

Matrix range_projector(const PsdMatrix& m) {
  return spectral_apply(m, m.cutoff(), [](double) { return 1.0; });
}

double heinz_contraction(const PsdMatrix& f, const PsdMatrix& g, double alpha) {
  check_alpha(alpha, 0.5);
  check_order(f, g);
  // F ≤ G, so the cutoff of G bounds the numerically meaningful part of F.
  const double cutoff = g.cutoff();
  const Matrix f_pow = spectral_apply(f, cutoff, [alpha](double v) { return std::pow(v, alpha); });
  const Matrix g_inv = spectral_apply(g, cutoff, [alpha](double v) { return std::pow(v, -alpha); });
  return spectral_norm(g_inv * f_pow);
}

double range_inclusion_residual(const PsdMatrix& f, const PsdMatrix& g, double alpha) {
  check_alpha(alpha, 0.5);
  check_order(f, g);
  const double cutoff = g.cutoff();
  const Matrix f_pow = spectral_apply(f, cutoff, [alpha](double v) { return std::pow(v, alpha); });
  const double scale = f_pow.norm();
  if (scale == 0.0) return 0.0;
  const Matrix proj = range_projector(g);  // ran(G^α) = ran(G)
  const Matrix leak = f_pow - proj * f_pow;
  return leak.norm() / scale;
}

bool range_inclusion(const PsdMatrix& f, const PsdMatrix& g, double alpha, double tol) {
  return range_inclusion_residual(f, g, alpha) <= tol;
}

RankFactorization seminorm_quotient(const PsdMatrix& gram) { return psd_factorize(gram); }

bool all_finite(const Matrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
    }
  }
  return true;
}

Matrix hermitian_part(const Matrix& m) { return (m + m.adjoint()) * 0.5; }

Matrix imaginary_part(const Matrix& m) { return (m - m.adjoint()) / Complex(0.0, 2.0); }

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double min_eigenvalue(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double orthonormality_defect(const Matrix& q) {
  return (q.adjoint() * q - Matrix::Identity(q.cols(), q.cols())).norm();
}

}  // namespace opmodel
