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

#include "opmodel/herglotz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace opmodel {

namespace {

constexpr double kConvergenceTol = 1e-6;
constexpr double kScanTol = 1e-10;

// Extrapolates f(h) = f₀ + a·h + O(h²) to h = 0 from two samples.
Matrix richardson(const Matrix& f1, double h1, const Matrix& f2, double h2) {
  return (f2 * h1 - f1 * h2) / (h1 - h2);
}

}  // namespace

MatrixHerglotz MatrixHerglotz::create(Matrix c, Matrix d, std::optional<AtomicOperatorMeasure> omega,
                                      HerglotzForm form, double tol) {
  if (c.rows() != c.cols() || d.rows() != c.rows() || d.cols() != c.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "C and D must be k × k");
  }
  if (c.rows() < 1) throw Error(ErrorKind::InvalidArgument, "k must be positive");
  if ((c - c.adjoint()).norm() > tol * std::max(1.0, c.norm())) {
    throw Error(ErrorKind::NotHermitian, "C is not Hermitian");
  }
  const PsdMatrix dpsd = validate_psd(d, tol);
  if (omega && omega->dim() != c.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "measure dimension differs from k");
  }
  return MatrixHerglotz{hermitian_part(c), dpsd.matrix(), std::move(omega), form};
}

Matrix eval_formula(const MatrixHerglotz& h, Complex z) {
  if (z.imag() == 0.0) throw Error(ErrorKind::RealShift, "z must be non-real");
  Matrix m = h.c.cast<Complex>() + h.d * z;
  if (h.omega) {
    for (const auto& atom : h.omega->atoms()) {
      const double l = atom.lambda;
      Complex kernel = 1.0 / (l - z);
      if (h.form == HerglotzForm::Nevanlinna) kernel -= l / (1.0 + l * l);
      m += atom.weight.matrix() * kernel;
    }
  }
  return m;
}

Matrix eval(const MatrixHerglotz& h, Complex z) {
  if (!(z.imag() > 0.0)) throw Error(ErrorKind::LowerHalfPlane, "Im z must be positive");
  return eval_formula(h, z);
}

MatrixFunction evaluator(const MatrixHerglotz& h) {
  return [h](Complex z) { return eval_formula(h, z); };
}

Matrix nevanlinna_c(const MatrixHerglotz& h) {
  Matrix c = h.c;
  if (h.form == HerglotzForm::Stieltjes && h.omega) {
    for (const auto& atom : h.omega->atoms()) {
      c += atom.weight.matrix() * (atom.lambda / (1.0 + atom.lambda * atom.lambda));
    }
  }
  return c;
}

RecoveredCD recover_cd(const MatrixFunction& m) {
  const Complex i(0.0, 1.0);
  RecoveredCD out;
  out.c = hermitian_part(m(i));

  auto slope = [&](double eta) { return hermitian_part(m(i * eta) / (i * eta)); };
  const double etas[] = {1e2, 1e3, 1e4};
  const Matrix f0 = slope(etas[0]), f1 = slope(etas[1]), f2 = slope(etas[2]);
  auto h = [](double eta) { return 1.0 / (eta * eta); };
  const Matrix coarse = richardson(f0, h(etas[0]), f1, h(etas[1]));
  const Matrix fine = richardson(f1, h(etas[1]), f2, h(etas[2]));
  if ((fine - coarse).norm() > kConvergenceTol * std::max(1.0, fine.norm())) {
    throw Error(ErrorKind::NonConvergent, "linear coefficient extrapolation did not settle");
  }
  out.d = hermitian_part(fine);
  return out;
}

PsdMatrix stieltjes_invert(const MatrixFunction& m, double lambda0, const std::vector<double>& ladder) {
  if (ladder.size() < 3) throw Error(ErrorKind::InvalidArgument, "epsilon ladder needs 3 or more steps");
  if (!std::isfinite(lambda0)) throw Error(ErrorKind::InvalidArgument, "lambda0 must be finite");

  std::vector<Matrix> samples;
  for (double eps : ladder) {
    if (!(eps > 0.0)) throw Error(ErrorKind::InvalidArgument, "epsilon must be positive");
    samples.push_back(eps * imaginary_part(m(Complex(lambda0, eps))));
  }
  std::vector<Matrix> extrapolated;
  for (std::size_t s = 0; s + 1 < ladder.size(); ++s) {
    extrapolated.push_back(richardson(samples[s], ladder[s] * ladder[s], samples[s + 1],
                                      ladder[s + 1] * ladder[s + 1]));
  }
  const Matrix& last = extrapolated.back();
  const Matrix& prev = extrapolated[extrapolated.size() - 2];
  if ((last - prev).norm() > kConvergenceTol * std::max(1.0, last.norm())) {
    throw Error(ErrorKind::NonConvergent, "boundary limit did not settle along the epsilon ladder");
  }
  // Round-off leaves eigenvalues of order 1e−12 on either side of zero; clip
  // those and reject anything more negative than the convergence tolerance.
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(last));
  RealVector vals = es.eigenvalues();
  const double floor = -kConvergenceTol * std::max(1.0, last.norm());
  if (vals.size() && vals.minCoeff() < floor) {
    throw Error(ErrorKind::NonConvergent, "extrapolated weight is not positive semidefinite");
  }
  vals = vals.cwiseMax(0.0);
  const Matrix& v = es.eigenvectors();
  return validate_psd(v * vals.cast<Complex>().asDiagonal() * v.adjoint(), kConvergenceTol);
}

PsdMatrix stieltjes_invert(const MatrixHerglotz& h, double lambda0, const std::vector<double>& ladder) {
  return stieltjes_invert(evaluator(h), lambda0, ladder);
}

ScanResult herglotz_scan(const MatrixFunction& m, const std::vector<Complex>& grid) {
  if (grid.empty()) throw Error(ErrorKind::InvalidArgument, "scan grid is empty");
  ScanResult out;
  out.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (Complex z : grid) {
    if (!(z.imag() > 0.0)) throw Error(ErrorKind::LowerHalfPlane, "scan points must lie in C+");
    const double low = min_eigenvalue(imaginary_part(m(z)));
    if (low < out.min_eigenvalue) {
      out.min_eigenvalue = low;
      out.argmin = z;
    }
  }
  out.report = Report::make("herglotz_scan", std::max(0.0, -out.min_eigenvalue), kScanTol);
  return out;
}

std::vector<Complex> default_grid() {
  std::vector<Complex> grid;
  for (int a = 0; a < 10; ++a) {
    const double re = -5.0 + 10.0 * a / 9.0;
    for (int b = 0; b < 10; ++b) {
      const double im = std::pow(10.0, -2.0 + 3.0 * b / 9.0);
      grid.emplace_back(re, im);
    }
  }
  return grid;
}

void write_im_csv(const MatrixFunction& m, const std::vector<Complex>& grid, std::ostream& out) {
  if (grid.empty()) return;
  const Matrix first = m(grid.front());
  out << "re_z,im_z";
  for (Eigen::Index r = 0; r < first.rows(); ++r) {
    for (Eigen::Index c = 0; c < first.cols(); ++c) {
      out << ",im_m_" << r << "_" << c << "_re,im_m_" << r << "_" << c << "_im";
    }
  }
  out << "\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
  };
  for (Complex z : grid) {
    const Matrix im = imaginary_part(m(z));
    put(z.real());
    out << ",";
    put(z.imag());
    for (Eigen::Index r = 0; r < im.rows(); ++r) {
      for (Eigen::Index c = 0; c < im.cols(); ++c) {
        out << ",";
        put(im(r, c).real());
        out << ",";
        put(im(r, c).imag());
      }
    }
    out << "\n";
  }
}

MatrixHerglotz from_perturbation(const PerturbationInstance& inst, double tol) {
  const Eigen::Index k = inst.k();
  return MatrixHerglotz::create(Matrix::Zero(k, k), Matrix::Zero(k, k), omega_measure(inst, tol),
                                HerglotzForm::Stieltjes, tol);
}

MatrixHerglotz from_weyl_titchmarsh(const Matrix& h, const Matrix& nbasis, double tol) {
  const Eigen::Index k = nbasis.cols();
  return MatrixHerglotz::create(Matrix::Zero(k, k), Matrix::Zero(k, k),
                                AtomicOperatorMeasure::create(k, weyl_titchmarsh_atoms(h, nbasis, tol), tol),
                                HerglotzForm::Nevanlinna, tol);
}

}  // namespace opmodel
