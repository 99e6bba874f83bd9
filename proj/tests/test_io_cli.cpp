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

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "opmodel/suites.hpp"
#include "test_util.hpp"

using namespace opmodel;
using testutil::diff;
using testutil::kind_of;
using testutil::mat;

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run_cli(const std::string& args) {
  const std::string cmd = std::string(OPMODEL_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("opmodel_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

std::string write(const std::string& name, const std::string& text) {
  const fs::path p = scratch(name);
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const std::string kRankOne = R"({"h0": [[[0,0],[0,0]],[[0,0],[1,0]]], "k": [[[1,0]],[[0,0]]], "l": [[[1,0]]]})";

}  // namespace

TEST_CASE("format_double") {
  CHECK(io::format_double(0.1) == "0.10000000000000001");
  CHECK(io::format_double(1.0) == "1.0");
  CHECK(io::format_double(-2.5e-300) == "-2.5e-300");
  CHECK(io::format_double(1e-8) == "1e-08");
  CHECK(io::format_double(0.0) == "0.0");
  CHECK(io::format_double(kInf) == "inf");
  CHECK(std::stod(io::format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("json round trips") {
  Rng rng(71, 0, field::kMeasure);
  const auto sigma = gen::random_measure(rng, {4, 5});
  const auto back = io::measure_from_json(io::parse(io::dump(io::to_json(sigma))));
  REQUIRE(back.size() == sigma.size());
  for (std::size_t j = 0; j < sigma.size(); ++j) {
    CHECK(back.atoms()[j].lambda == sigma.atoms()[j].lambda);
    CHECK(back.atoms()[j].weight.matrix() == sigma.atoms()[j].weight.matrix());
  }

  const BorelSet b({{-kInf, -1.0}, {2.0, kInf}});
  CHECK(io::dump(io::to_json(b)) == R"({"intervals":[["-inf",-1.0],[2.0,"inf"]]})");
  CHECK(io::borel_from_json(io::to_json(b)) == b);

  const StepFunction u = gen::random_step_function(rng, 3);
  const StepFunction u2 = io::step_from_json(io::parse(io::dump(io::to_json(u))));
  REQUIRE(u2.terms.size() == u.terms.size());
  CHECK(u2.terms[0].xi == u.terms[0].xi);

  const auto inst = gen::random_perturbation(rng, 5, 2);
  CHECK(io::perturbation_from_json(io::to_json(inst)).kmap == inst.kmap);

  const auto h = gen::random_herglotz(rng);
  const auto h2 = io::herglotz_from_json(io::parse(io::dump(io::to_json(h))));
  CHECK(h2.c == h.c);
  CHECK(h2.omega->size() == h.omega->size());

  const auto s = gen::random_semimetric(rng);
  CHECK(io::semimetric_from_json(io::to_json(s)).rho == s.rho);

  const Report r = Report::make("x", 0.5, 1.0);
  CHECK(io::dump(io::to_json(r)) == R"({"identity":"x","residual":0.5,"tolerance":1.0,"pass":true})");
}

TEST_CASE("parse errors") {
  CHECK(kind_of([] { io::parse("{not json"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { io::measure_from_json(io::parse(R"({"atoms": []})")); }) == ErrorKind::Parse);
  CHECK(kind_of([] { io::matrix_from_json(io::parse("[[[1,0]],[[1,0],[2,0]]]")); }) == ErrorKind::Parse);
  CHECK(kind_of([] { io::herglotz_from_json(io::parse(R"({"c":[[[0,0]]],"d":[[[0,0]]],"form":"x"})")); }) ==
        ErrorKind::Parse);
  CHECK(kind_of([] { io::read_file("/nonexistent/opmodel.json"); }) == ErrorKind::Io);
}

TEST_CASE("rng streams") {
  Rng a(1, 2, 3);
  Rng b(1, 2, 3);
  Rng c(1, 2, 4);
  const auto x = a.next_u64();
  CHECK(x == b.next_u64());
  CHECK(x != c.next_u64());
  double sum = 0.0;
  double sq = 0.0;
  Rng g(9, 0, 0);
  for (int i = 0; i < 20000; ++i) {
    const double v = g.normal();
    sum += v;
    sq += v * v;
  }
  CHECK(std::abs(sum / 20000) < 0.03);
  CHECK(std::abs(sq / 20000 - 1.0) < 0.05);
  for (int i = 0; i < 1000; ++i) {
    const auto k = g.integer(-2, 3);
    CHECK(k >= -2);
    CHECK(k <= 3);
  }
}

TEST_CASE("generators respect caps") {
  for (std::uint64_t i = 0; i < 200; ++i) {
    Rng rng(72, i, field::kMeasure);
    const auto sigma = gen::random_measure(rng, {6, 8}, i % 2 == 0);
    CHECK(sigma.dim() <= 6);
    CHECK(sigma.size() <= 8);
    CHECK(sigma.size() >= 1);
    if (i % 2 == 0) CHECK(total(sigma).rank() < sigma.dim());
    const auto inst = gen::random_perturbation(rng, 8, 3);
    CHECK(inst.n() <= 8);
    CHECK(inst.k() <= std::min<Eigen::Index>(3, inst.n()));
    CHECK(generating_check(inst).is_generating);
  }
}

TEST_CASE("ingest_density") {
  const Matrix id = Matrix::Identity(2, 2);
  const auto trap = ingest_density({{0.0, id}, {1.0, id}}, QuadratureRule::Trapezoid);
  REQUIRE(trap.size() == 2);
  CHECK(diff(trap.atoms()[0].weight.matrix(), id / 2.0) == 0.0);
  CHECK(diff(trap.atoms()[1].weight.matrix(), id / 2.0) == 0.0);
  CHECK(diff(total(trap).matrix(), id) == 0.0);

  const auto mid = ingest_density({{0.0, id}, {1.0, id}}, QuadratureRule::Midpoint);
  REQUIRE(mid.size() == 1);
  CHECK(mid.atoms()[0].lambda == 0.5);

  std::vector<std::pair<double, Matrix>> gauss;
  for (int i = 0; i <= 100; ++i) {
    const double x = -5.0 + 0.1 * i;
    gauss.emplace_back(x, Matrix::Constant(1, 1, std::exp(-x * x / 2) / std::sqrt(2 * M_PI)));
  }
  const double analytic = std::erf(5.0 / std::sqrt(2.0));
  for (auto rule : {QuadratureRule::Trapezoid, QuadratureRule::Midpoint}) {
    CHECK(std::abs(total(ingest_density(gauss, rule)).matrix()(0, 0).real() - analytic) < 1e-4);
  }

  CHECK(kind_of([&] { ingest_density({{1.0, id}, {0.0, id}}, QuadratureRule::Trapezoid); }) ==
        ErrorKind::UnsortedSamples);
  CHECK(kind_of([&] { ingest_density({{0.0, id}, {0.0, id}}, QuadratureRule::Trapezoid); }) ==
        ErrorKind::UnsortedSamples);
  CHECK(kind_of([&] { ingest_density({{0.0, id}}, QuadratureRule::Trapezoid); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("suites are deterministic across thread counts") {
  RunConfig cfg;
  cfg.count = 6;
  cfg.threads = 1;
  const auto a = run_verify("all", cfg);
  cfg.threads = 4;
  const auto b = run_verify("all", cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(to_json_line(a[i]) == to_json_line(b[i]));
  for (const auto& r : a) CHECK(r.report.pass);
}

TEST_CASE("cli gen") {
  const fs::path dir = scratch("gen");
  fs::create_directories(dir);
  REQUIRE(run_cli("gen measures --seed 1 --count 2 --out " + dir.string()).code == 0);
  const std::string first = slurp(dir / "measures-0.json");
  CHECK(fs::exists(dir / "measures-1.json"));
  CHECK_FALSE(fs::exists(dir / "measures-2.json"));
  REQUIRE(run_cli("gen measures --seed 1 --count 2 --out " + dir.string()).code == 0);
  CHECK(slurp(dir / "measures-0.json") == first);
  const auto sigma = io::measure_from_json(io::parse(first));
  CHECK(sigma.dim() <= 6);
  CHECK(sigma.size() <= 8);

  const fs::path empty = scratch("gen_empty");
  fs::create_directories(empty);
  CHECK(run_cli("gen measures --count 0 --out " + empty.string()).code == 0);
  CHECK(fs::is_empty(empty));
}

TEST_CASE("cli verify exit codes") {
  const Run ok = run_cli("verify perturbation --count 1 --seed 7");
  CHECK(ok.code == 0);
  CHECK(ok.out.find("\"identity\":\"omega_total\"") != std::string::npos);
  CHECK(ok.out.find("\"identity\":\"m_function_stieltjes\"") != std::string::npos);
  CHECK(ok.out.find("\"identity\":\"diagonalization\"") != std::string::npos);

  const std::string corrupt = write("corrupt.json", "{\"dim\": 2, \"atoms\": [");
  CHECK(run_cli("verify measures --input " + corrupt).code == 2);
  CHECK(run_cli("verify measures --input /nonexistent/x.json").code == 2);
  CHECK(run_cli("verify nosuchsuite").code == 2);

  const std::string two = write("two.json", R"({"dim":2,"atoms":[{"lambda":0,"matrix":[[[1,0],[0,0]],[[0,0],[0,0]]]},)"
                                            R"({"lambda":1,"matrix":[[[1,0],[1,0]],[[1,0],[1,0]]]}]})");
  CHECK(run_cli("verify model --input " + two).code == 0);
  CHECK(run_cli("verify model --strict-covariance --seed 1 --input " + two).code == 1);
}

TEST_CASE("cli tolerance precedence") {
  const std::string two = write("two_tol.json", R"({"dim":2,"atoms":[{"lambda":0,"matrix":[[[1,0],[0,0]],[[0,0],[0,0]]]},)"
                                                R"({"lambda":1,"matrix":[[[1,0],[1,0]],[[1,0],[1,0]]]}]})");
  const std::string cli = OPMODEL_CLI_PATH;
  CHECK(WEXITSTATUS(std::system(("OPMODEL_TOL=junk " + cli + " verify model --input " + two + " >/dev/null 2>&1").c_str())) == 2);
  const Run env = run_cli("verify model --input " + two);
  CHECK(env.out.find("\"tolerance\":1e-10") != std::string::npos);
  const std::string env_cmd = "OPMODEL_TOL=1e-8 " + cli + " verify model --input " + two + " > " +
                              scratch("env.jsonl").string() + " 2>/dev/null";
  CHECK(WEXITSTATUS(std::system(env_cmd.c_str())) == 0);
  CHECK(slurp(scratch("env.jsonl")).find("\"identity\":\"gram_lambda\",\"residual\":0.0,\"tolerance\":1e-08") !=
        std::string::npos);
  const std::string flag_cmd = "OPMODEL_TOL=1e-8 " + cli + " --tol 1e-9 verify model --input " + two + " > " +
                               scratch("flag.jsonl").string() + " 2>/dev/null";
  CHECK(WEXITSTATUS(std::system(flag_cmd.c_str())) == 0);
  CHECK(slurp(scratch("flag.jsonl")).find("\"tolerance\":1.0000000000000001e-09") != std::string::npos);
}

TEST_CASE("cli diagonalize") {
  const Run r = run_cli("diagonalize " + write("rank1.json", kRankOne));
  CHECK(r.code == 0);
  const io::Json j = io::parse(r.out);
  CHECK(j["eigenvalues"].size() == 1);
  CHECK(std::abs(j["eigenvalues"][0].get<double>() - 1.0) < 1e-14);
  REQUIRE(j["omega"]["atoms"].size() == 1);
  CHECK(std::abs(j["omega"]["atoms"][0]["matrix"][0][0][0].get<double>() - 1.0) < 1e-14);
  CHECK(j["generated_dim"].get<int>() < j["n"].get<int>());
  CHECK_FALSE(j["generating"].get<bool>());

  const std::string free = R"({"h0": [[[0,0],[0,0]],[[0,0],[2,0]]], "k": [[[1,0],[0,0]],[[0,0],[1,0]]], "l": [[[0,0],[0,0]],[[0,0],[0,0]]]})";
  const Run f = run_cli("diagonalize " + write("free.json", free));
  CHECK(f.code == 0);
  const io::Json jf = io::parse(f.out);
  CHECK(jf["omega"]["atoms"].size() == 2);
  CHECK(jf["generating"].get<bool>());

  CHECK(run_cli("diagonalize " + write("bad.json", R"({"h0": 1})")).code == 2);
}

TEST_CASE("cli herglotz") {
  const std::string lin = write("lin.json", R"({"c": [[[0,0]]], "d": [[[1,0]]], "omega": null, "form": "nevanlinna"})");
  const Run e = run_cli("herglotz eval " + lin);
  REQUIRE(e.code == 0);
  std::istringstream csv(e.out);
  std::string line;
  std::getline(csv, line);
  int rows = 0;
  while (std::getline(csv, line)) {
    std::vector<double> v;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) v.push_back(std::stod(cell));
    REQUIRE(v.size() == 4);
    CHECK(v[2] == v[1]);
    ++rows;
  }
  CHECK(rows == 100);

  const fs::path dir = scratch("herg");
  fs::create_directories(dir);
  REQUIRE(run_cli("gen herglotz --seed 4 --count 1 --out " + dir.string()).code == 0);
  const Run inv = run_cli("herglotz invert " + (dir / "herglotz-0.json").string());
  CHECK(inv.code == 0);
  const io::Json ij = io::parse(inv.out);
  for (const auto& rep : ij["residuals"]) CHECK(rep["pass"].get<bool>());

  const std::string pm = write("pm.json", R"({"c": [[[0,0]]], "d": [[[0,0]]], "omega": {"dim":1,"atoms":[{"lambda":0,"matrix":[[[1,0]]]}]}, "form": "nevanlinna"})");
  CHECK(run_cli("herglotz invert --at 0.000001 " + pm).code == 1);

  const std::string pert = write("pert.json", kRankOne);
  CHECK(run_cli("herglotz scan --from-perturbation " + pert).code == 0);
  CHECK(run_cli("herglotz scan " + write("junk.json", "[1,2")).code == 2);
}

TEST_CASE("cli complete and ingest") {
  const Run c = run_cli("complete " + write("sm.json", R"({"rho": [[0,0,1],[0,0,1],[1,1,0]]})"));
  CHECK(c.code == 0);
  const io::Json j = io::parse(c.out);
  CHECK(j["classes"].size() == 2);
  CHECK(j["isometry"]["max_distortion"].get<double>() == 0.0);
  CHECK(run_cli("complete " + write("sm_bad.json", R"({"rho": [[0,3,1],[3,0,1],[1,1,0]]})")).code == 2);

  const Run in = run_cli("ingest " + write("samples.json", R"({"samples": [{"lambda": 0, "matrix": [[[1,0]]]}, {"lambda": 1, "matrix": [[[1,0]]]}], "rule": "trapezoid"})"));
  CHECK(in.code == 0);
  CHECK(io::measure_from_json(io::parse(in.out)).size() == 2);
  CHECK(run_cli("ingest " + write("unsorted.json", R"({"samples": [{"lambda": 1, "matrix": [[[1,0]]]}, {"lambda": 0, "matrix": [[[1,0]]]}]})")).code == 2);
}
