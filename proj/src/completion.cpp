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

#include "opmodel/completion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace opmodel {

namespace {

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void join(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Groups items by the zero relation of `dist` (item index → point of S).
MetricSpaceResult quotient(const FiniteSemiMetric& s, const std::vector<std::size_t>& points,
                           double zero_tol) {
  const std::size_t n = points.size();
  DisjointSets sets(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (s.rho(points[a], points[b]) <= zero_tol) sets.join(a, b);
    }
  }
  MetricSpaceResult out;
  std::vector<std::size_t> slot(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t root = sets.find(a);
    if (slot[root] == n) {
      slot[root] = out.classes.size();
      out.classes.emplace_back();
      out.representatives.push_back(points[a]);
    }
    out.classes[slot[root]].push_back(a);
  }
  const auto m = static_cast<Eigen::Index>(out.classes.size());
  out.dist.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      out.dist(i, j) = i == j ? 0.0 : s.rho(out.representatives[i], out.representatives[j]);
    }
  }
  return out;
}

}  // namespace

FiniteSemiMetric validate_semimetric(const Eigen::MatrixXd& rho, double tol) {
  if (rho.rows() != rho.cols()) throw Error(ErrorKind::DimensionMismatch, "rho must be square");
  const Eigen::Index n = rho.rows();
  std::ostringstream os;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!std::isfinite(rho(i, j)) || rho(i, j) < -tol) {
        os << "nonnegativity fails at (" << i << ", " << j << ")";
        throw Error(ErrorKind::AxiomViolation, os.str());
      }
    }
    if (std::abs(rho(i, i)) > tol) {
      os << "rho(x,x) = 0 fails at " << i;
      throw Error(ErrorKind::AxiomViolation, os.str());
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (std::abs(rho(i, j) - rho(j, i)) > tol) {
        os << "symmetry fails at (" << i << ", " << j << ")";
        throw Error(ErrorKind::AxiomViolation, os.str());
      }
    }
  }
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      for (Eigen::Index c = 0; c < n; ++c) {
        if (rho(a, b) > rho(a, c) + rho(c, b) + tol) {
          os << "triangle inequality fails at (" << a << ", " << b << ", " << c << "): " << rho(a, b)
             << " > " << rho(a, c) + rho(c, b);
          throw Error(ErrorKind::AxiomViolation, os.str());
        }
      }
    }
  }
  return FiniteSemiMetric{rho};
}

MetricSpaceResult route2_quotient(const FiniteSemiMetric& s, double zero_tol) {
  std::vector<std::size_t> points(s.size());
  std::iota(points.begin(), points.end(), 0);
  return quotient(s, points, zero_tol);
}

MetricSpaceResult route1_complete_then_quotient(const FiniteSemiMetric& s,
                                                const std::vector<CauchySequence>& sequences,
                                                double zero_tol) {
  std::vector<std::size_t> tails;
  for (const auto& seq : sequences) {
    if (seq.tail >= s.size()) throw Error(ErrorKind::InvalidArgument, "sequence tail out of range");
    for (std::size_t p : seq.stem) {
      if (p >= s.size()) throw Error(ErrorKind::InvalidArgument, "sequence stem out of range");
    }
    tails.push_back(seq.tail);
  }
  return quotient(s, tails, zero_tol);
}

std::vector<CauchySequence> constant_sequences(const FiniteSemiMetric& s) {
  std::vector<CauchySequence> out;
  for (std::size_t p = 0; p < s.size(); ++p) out.push_back({{}, p});
  return out;
}

Isometry isometry_j(const MetricSpaceResult& r1, const MetricSpaceResult& r2, double tol) {
  std::size_t points = 0;
  for (const auto& cls : r2.classes) {
    for (std::size_t p : cls) points = std::max(points, p + 1);
  }
  std::vector<std::size_t> class_of(points, r2.classes.size());
  for (std::size_t c = 0; c < r2.classes.size(); ++c) {
    for (std::size_t p : r2.classes[c]) class_of[p] = c;
  }

  Isometry j;
  std::vector<bool> hit(r2.classes.size(), false);
  for (std::size_t rep : r1.representatives) {
    if (rep >= points) throw Error(ErrorKind::IsometryFailure, "route-I tail outside route-II points");
    const std::size_t target = class_of[rep];
    if (hit[target]) throw Error(ErrorKind::IsometryFailure, "J is not injective");
    hit[target] = true;
    j.mapping.push_back(target);
  }
  if (std::find(hit.begin(), hit.end(), false) != hit.end()) {
    throw Error(ErrorKind::IsometryFailure, "J is not surjective: some class has no tail");
  }
  for (std::size_t a = 0; a < j.mapping.size(); ++a) {
    for (std::size_t b = 0; b < j.mapping.size(); ++b) {
      const double lhs = r1.dist(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      const double rhs = r2.dist(static_cast<Eigen::Index>(j.mapping[a]),
                                 static_cast<Eigen::Index>(j.mapping[b]));
      j.max_distortion = std::max(j.max_distortion, std::abs(lhs - rhs));
    }
  }
  if (j.max_distortion > tol) {
    std::ostringstream os;
    os << "J distorts distances by " << j.max_distortion;
    throw Error(ErrorKind::IsometryFailure, os.str());
  }
  return j;
}

Report verify_metric_axioms(const MetricSpaceResult& r, double tol) {
  const Eigen::Index m = r.dist.rows();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    worst = std::max(worst, std::abs(r.dist(i, i)));
    for (Eigen::Index j = 0; j < m; ++j) {
      worst = std::max(worst, std::abs(r.dist(i, j) - r.dist(j, i)));
      if (i != j && !(r.dist(i, j) > 0.0)) worst = std::max(worst, 1.0);
      for (Eigen::Index k = 0; k < m; ++k) {
        worst = std::max(worst, r.dist(i, j) - r.dist(i, k) - r.dist(k, j));
      }
    }
  }
  return Report::make("metric_axioms", worst, tol);
}

Report verify_quotient_well_defined(const FiniteSemiMetric& s, const MetricSpaceResult& r2, double tol) {
  double worst = 0.0;
  for (const auto& cx : r2.classes) {
    for (const auto& cy : r2.classes) {
      const double ref = s.rho(cx.front(), cy.front());
      for (std::size_t x : cx) {
        for (std::size_t y : cy) worst = std::max(worst, std::abs(s.rho(x, y) - ref));
      }
    }
  }
  return Report::make("quotient_well_defined", worst, tol);
}

RankFactorization seminormed_quotient_bridge(const PsdMatrix& gram) { return seminorm_quotient(gram); }

}  // namespace opmodel
