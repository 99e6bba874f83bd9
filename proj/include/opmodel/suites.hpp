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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "opmodel/io.hpp"
#include "opmodel/random.hpp"

namespace opmodel {

struct Caps {
  Eigen::Index max_dim = 6;
  std::size_t max_atoms = 8;
  Eigen::Index max_n = 8;
  Eigen::Index max_k = 3;
};

struct RunConfig {
  std::uint64_t seed = 1;
  double tol = kDefaultTol;
  std::size_t count = 10;
  Caps caps;
  unsigned threads = 0;  // 0: hardware concurrency, capped at 8
  // Adds the literal vector form of the S(B) covariance to the model suite.
  bool strict_covariance = false;

  void validate() const;
};

struct VerificationReport {
  std::string suite;
  std::size_t instance = 0;
  std::size_t check = 0;
  Report report;
  std::string fingerprint;  // s<seed>-i<index>-<FNV-1a of the instance JSON>
};

std::string to_json_line(const VerificationReport& r);

const std::vector<std::string>& suite_names();

/// Instances run on a worker pool; the result is ordered by (instance, check)
/// regardless of scheduling. An instance that throws contributes one failed
/// report whose identity names the error kind.
std::vector<VerificationReport> run_suite(const std::string& suite, const RunConfig& cfg);

/// `suite` is one of suite_names() or "all".
std::vector<VerificationReport> run_verify(const std::string& suite, const RunConfig& cfg);

/// Checks one instance read from JSON (schema chosen by the suite). Probe
/// sets and vectors are drawn from (cfg.seed, 0).
std::vector<VerificationReport> verify_instance(const std::string& suite, const io::Json& instance,
                                                const RunConfig& cfg);

/// Instance `index` of the generator family behind `suite`, as JSON.
io::Json generate_instance(const std::string& suite, const RunConfig& cfg, std::size_t index);

enum class QuadratureRule { Trapezoid, Midpoint };

/// Converts samples (λ_i, ρ(λ_i)) of a PSD density into atoms.
/// Trapezoid: atom at each sample with the trapezoid weight.
/// Midpoint: one atom per interval at its midpoint carrying
/// (b − a)·(ρ(a) + ρ(b))/2. Both rules give the same total mass.
AtomicOperatorMeasure ingest_density(const std::vector<std::pair<double, Matrix>>& samples, QuadratureRule rule,
                                     double tol = kDefaultTol);

}  // namespace opmodel
