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

#include "opmodel/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace opmodel::io {

namespace {

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorKind::Parse, what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) parse_fail(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

double number(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  parse_fail("expected a number, got " + j.dump());
}

Complex complex_entry(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) parse_fail("expected [re, im], got " + j.dump());
  return {number(j[0]), number(j[1])};
}

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

void dump_into(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ',';
        first = false;
        out += Json(key).dump();
        out += ':';
        dump_into(value, out);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        dump_into(j[i], out);
      }
      out += ']';
      break;
    }
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      out += std::isfinite(x) ? format_double(x) : "\"" + format_double(x) + "\"";
      break;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(i, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_json(v(i)));
  return out;
}

Json to_json(const BorelSet& b) {
  Json pieces = Json::array();
  auto endpoint = [](double x) -> Json {
    if (x == kInf) return "inf";
    if (x == -kInf) return "-inf";
    return x;
  };
  for (const auto& iv : b.intervals()) pieces.push_back(Json::array({endpoint(iv.lo), endpoint(iv.hi)}));
  return Json{{"intervals", pieces}};
}

Json to_json(const AtomicOperatorMeasure& sigma) {
  Json atoms = Json::array();
  for (const Atom& a : sigma.atoms()) {
    atoms.push_back(Json{{"lambda", a.lambda}, {"matrix", to_json(a.weight.matrix())}});
  }
  return Json{{"dim", sigma.dim()}, {"atoms", atoms}};
}

Json to_json(const StepFunction& u) {
  Json terms = Json::array();
  for (const auto& t : u.terms) terms.push_back(Json{{"set", to_json(t.set)}, {"xi", to_json(t.xi)}});
  return Json{{"terms", terms}};
}

Json to_json(const PerturbationInstance& inst) {
  return Json{{"h0", to_json(inst.h0)}, {"k", to_json(inst.kmap)}, {"l", to_json(inst.ell)}};
}

Json to_json(const MatrixHerglotz& h) {
  Json j{{"c", to_json(h.c)}, {"d", to_json(h.d)}};
  j["omega"] = h.omega ? to_json(*h.omega) : Json(nullptr);
  j["form"] = h.form == HerglotzForm::Stieltjes ? "stieltjes" : "nevanlinna";
  return j;
}

Json to_json(const FiniteSemiMetric& s) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < s.rho.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < s.rho.cols(); ++c) row.push_back(s.rho(i, c));
    rows.push_back(std::move(row));
  }
  return Json{{"rho", rows}};
}

Json to_json(const Report& r) {
  return Json{{"identity", r.identity}, {"residual", r.residual}, {"tolerance", r.tolerance}, {"pass", r.pass}};
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array()) parse_fail("matrix must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows == 0 ? 0 : static_cast<Eigen::Index>(j[0].is_array() ? j[0].size() : 0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) parse_fail("ragged matrix rows");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = complex_entry(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) parse_fail("vector must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_entry(j[i]);
  return v;
}

BorelSet borel_from_json(const Json& j) {
  const Json& pieces = field(j, "intervals");
  if (!pieces.is_array()) parse_fail("\"intervals\" must be an array");
  std::vector<BorelSet::Interval> out;
  for (const Json& p : pieces) {
    if (!p.is_array() || p.size() != 2) parse_fail("interval must be [a, b]");
    out.push_back({number(p[0]), number(p[1])});
  }
  return BorelSet(std::move(out));
}

AtomicOperatorMeasure measure_from_json(const Json& j, double tol) {
  const Json& dim = field(j, "dim");
  if (!dim.is_number_integer()) parse_fail("\"dim\" must be an integer");
  const Json& atoms = field(j, "atoms");
  if (!atoms.is_array()) parse_fail("\"atoms\" must be an array");
  std::vector<std::pair<double, Matrix>> parsed;
  for (const Json& a : atoms) parsed.emplace_back(number(field(a, "lambda")), matrix_from_json(field(a, "matrix")));
  return AtomicOperatorMeasure::create(dim.get<Eigen::Index>(), parsed, tol);
}

StepFunction step_from_json(const Json& j) {
  const Json& terms = field(j, "terms");
  if (!terms.is_array()) parse_fail("\"terms\" must be an array");
  StepFunction u;
  for (const Json& t : terms) u.terms.push_back({borel_from_json(field(t, "set")), vector_from_json(field(t, "xi"))});
  return u;
}

PerturbationInstance perturbation_from_json(const Json& j, double tol) {
  return PerturbationInstance::create(matrix_from_json(field(j, "h0")), matrix_from_json(field(j, "k")),
                                      matrix_from_json(field(j, "l")), tol);
}

MatrixHerglotz herglotz_from_json(const Json& j, double tol) {
  const std::string form = field(j, "form").is_string() ? field(j, "form").get<std::string>() : "";
  HerglotzForm f;
  if (form == "stieltjes") {
    f = HerglotzForm::Stieltjes;
  } else if (form == "nevanlinna") {
    f = HerglotzForm::Nevanlinna;
  } else {
    parse_fail("\"form\" must be \"stieltjes\" or \"nevanlinna\"");
  }
  std::optional<AtomicOperatorMeasure> omega;
  if (j.contains("omega") && !j.at("omega").is_null()) omega = measure_from_json(j.at("omega"), tol);
  return MatrixHerglotz::create(matrix_from_json(field(j, "c")), matrix_from_json(field(j, "d")), std::move(omega), f,
                                tol);
}

FiniteSemiMetric semimetric_from_json(const Json& j) {
  const Json& rows = field(j, "rho");
  if (!rows.is_array()) parse_fail("\"rho\" must be an array of rows");
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd rho(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) parse_fail("\"rho\" must be square");
    for (Eigen::Index c = 0; c < n; ++c) rho(i, c) = number(row[static_cast<std::size_t>(c)]);
  }
  return validate_semimetric(rho);
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return std::signbit(x) ? "-0.0" : "0.0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string dump(const Json& j) {
  std::string out;
  dump_into(j, out);
  return out;
}

Json parse(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::exception& e) {
    parse_fail(e.what());
  }
}

Json read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path);
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

}  // namespace opmodel::io
