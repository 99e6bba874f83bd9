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

#include <stdexcept>
#include <string>
#include <string_view>

namespace opmodel {

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  NotHermitian,
  NotPsd,
  OrderViolation,
  ZeroAtom,
  InclusionViolation,
  BlockViolation,
  IdentityViolation,
  UniquenessViolation,
  DegenerateCoupling,
  RealShift,
  LowerHalfPlane,
  NonConvergent,
  AxiomViolation,
  IsometryFailure,
  UnsortedSamples,
  Parse,
  Io,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Outcome of one identity check. `pass` is always `residual <= tolerance`.
struct Report {
  std::string identity;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  ErrorKind failure = ErrorKind::IdentityViolation;

  static Report make(std::string identity, double residual, double tolerance,
                     ErrorKind failure = ErrorKind::IdentityViolation) {
    return Report{std::move(identity), residual, tolerance, residual <= tolerance, failure};
  }

  // Throws the report's failure kind when the check did not pass.
  const Report& require() const;
};

}  // namespace opmodel
