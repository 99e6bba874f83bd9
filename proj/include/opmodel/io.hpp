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
#include <string>
#include <string_view>

#include <json.hpp>

#include "opmodel/completion.hpp"
#include "opmodel/herglotz.hpp"

namespace opmodel::io {

using Json = nlohmann::ordered_json;

// Complex matrices are arrays of rows whose entries are [re, im] pairs;
// complex vectors are flat arrays of [re, im] pairs. Unbounded interval
// endpoints are the strings "-inf" and "inf".

Json to_json(const Matrix& m);
Json to_json(const Vector& v);
Json to_json(const BorelSet& b);
Json to_json(const AtomicOperatorMeasure& sigma);
Json to_json(const StepFunction& u);
Json to_json(const PerturbationInstance& inst);
Json to_json(const MatrixHerglotz& h);
Json to_json(const FiniteSemiMetric& s);
Json to_json(const Report& r);

Matrix matrix_from_json(const Json& j);
Vector vector_from_json(const Json& j);
BorelSet borel_from_json(const Json& j);
AtomicOperatorMeasure measure_from_json(const Json& j, double tol = kDefaultTol);
StepFunction step_from_json(const Json& j);
PerturbationInstance perturbation_from_json(const Json& j, double tol = kDefaultTol);
MatrixHerglotz herglotz_from_json(const Json& j, double tol = kDefaultTol);
FiniteSemiMetric semimetric_from_json(const Json& j);

/// Shortest form that still carries 17 significant digits ("%.17g"), so
/// output is byte-identical wherever printf is IEEE-correct. Non-finite
/// values become the strings "inf", "-inf" and "nan".
std::string format_double(double x);

/// Compact single-line serialization with format_double for every number.
std::string dump(const Json& j);

/// Throws Error(Parse) on malformed text.
Json parse(std::string_view text);

/// Throws Error(Io) when the file cannot be read, Error(Parse) when it is not JSON.
Json read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t x);

}  // namespace opmodel::io
