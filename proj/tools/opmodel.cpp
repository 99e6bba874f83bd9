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

// opmodel: instance generation, density ingestion, verification suites,
// diagonalization and Herglotz tooling.
//
// Exit codes: 0 all checks pass, 1 an identity check failed or a limit did
// not converge, 2 bad input or I/O failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "opmodel/suites.hpp"

namespace {

using namespace opmodel;
using io::Json;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInput = 2;

struct Globals {
  std::uint64_t seed = 1;
  double tol = kDefaultTol;
  std::size_t count = 10;
  std::string out;
  Caps caps;
  unsigned threads = 0;
};

RunConfig config(const Globals& g) {
  RunConfig cfg;
  cfg.seed = g.seed;
  cfg.tol = g.tol;
  cfg.count = g.count;
  cfg.caps = g.caps;
  cfg.threads = g.threads;
  cfg.validate();
  return cfg;
}

// Writes to --out when given, stdout otherwise.
void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
  } else {
    io::write_file(g.out, text);
  }
}

int exit_for(const std::vector<Report>& reports) {
  for (const auto& r : reports) {
    if (!r.pass) return kExitFail;
  }
  return kExitPass;
}

int exit_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::IdentityViolation:
    case ErrorKind::NonConvergent:
    case ErrorKind::InclusionViolation:
    case ErrorKind::BlockViolation:
    case ErrorKind::UniquenessViolation:
    case ErrorKind::IsometryFailure:
      return kExitFail;
    default:
      return kExitInput;
  }
}

Json reports_json(const std::vector<Report>& reports) {
  Json out = Json::array();
  for (const auto& r : reports) out.push_back(io::to_json(r));
  return out;
}

int cmd_gen(const Globals& g, const std::string& kind, const std::string& dir) {
  const std::string suite = kind == "semimetric" ? "completion" : kind;
  const RunConfig cfg = config(g);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir + ": " + ec.message());
  for (std::size_t i = 0; i < cfg.count; ++i) {
    const std::string path = dir + "/" + kind + "-" + std::to_string(i) + ".json";
    io::write_file(path, io::dump(generate_instance(suite, cfg, i)) + "\n");
  }
  return kExitPass;
}

int cmd_ingest(const Globals& g, const std::string& file, const std::string& rule_name) {
  const Json j = io::read_file(file);
  if (!j.contains("samples") || !j.at("samples").is_array()) throw Error(ErrorKind::Parse, "missing \"samples\" array");
  std::vector<std::pair<double, Matrix>> samples;
  for (const Json& s : j.at("samples")) {
    if (!s.contains("lambda") || !s.at("lambda").is_number() || !s.contains("matrix")) {
      throw Error(ErrorKind::Parse, "sample needs \"lambda\" and \"matrix\"");
    }
    samples.emplace_back(s.at("lambda").get<double>(), io::matrix_from_json(s.at("matrix")));
  }
  std::string name = rule_name;
  if (name.empty()) name = j.contains("rule") && j.at("rule").is_string() ? j.at("rule").get<std::string>() : "trapezoid";
  QuadratureRule rule;
  if (name == "trapezoid") {
    rule = QuadratureRule::Trapezoid;
  } else if (name == "midpoint") {
    rule = QuadratureRule::Midpoint;
  } else {
    throw Error(ErrorKind::InvalidArgument, "rule must be trapezoid or midpoint");
  }
  emit(g, io::dump(io::to_json(ingest_density(samples, rule, g.tol))) + "\n");
  return kExitPass;
}

int cmd_verify(const Globals& g, const std::string& suite, const std::string& input, bool strict) {
  RunConfig cfg = config(g);
  cfg.strict_covariance = strict;
  std::vector<VerificationReport> reports;
  if (input.empty()) {
    reports = run_verify(suite, cfg);
  } else {
    if (suite == "all") throw Error(ErrorKind::InvalidArgument, "--input needs a single suite");
    reports = verify_instance(suite, io::read_file(input), cfg);
  }
  std::string text;
  std::size_t failed = 0;
  for (const auto& r : reports) {
    text += to_json_line(r) + "\n";
    failed += r.report.pass ? 0 : 1;
  }
  emit(g, text);
  std::cerr << reports.size() << " checks, " << failed << " failed\n";
  return failed ? kExitFail : kExitPass;
}

int cmd_diagonalize(const Globals& g, const std::string& file) {
  const PerturbationInstance inst = io::perturbation_from_json(io::read_file(file), g.tol);
  const ModelUnitary mu = model_unitary(inst, g.tol);
  const DiagonalizationReport d = verify_diagonalization(mu, build_hl(inst), 10.0 * g.tol);
  const std::vector<Report> reports{verify_omega_total(inst, 1e-2 * g.tol), d.isometry, d.coisometry, d.conjugation,
                                    d.spectral_pullback};
  Json eig = Json::array();
  for (double x : mu.family.eigenvalues) eig.push_back(x);
  Json out{{"eigenvalues", eig},
           {"omega", io::to_json(mu.omega)},
           {"u", io::to_json(mu.u)},
           {"n", inst.n()},
           {"generated_dim", mu.generated.generated_dim},
           {"generating", mu.generated.is_generating},
           {"residuals", reports_json(reports)}};
  emit(g, io::dump(out) + "\n");
  return exit_for(reports);
}

MatrixHerglotz load_herglotz(const std::string& file, bool from_perturbation_file, double tol) {
  const Json j = io::read_file(file);
  if (from_perturbation_file) return from_perturbation(io::perturbation_from_json(j, tol), tol);
  return io::herglotz_from_json(j, tol);
}

int cmd_herglotz_eval(const Globals& g, const MatrixHerglotz& h) {
  std::ostringstream csv;
  write_im_csv(evaluator(h), default_grid(), csv);
  emit(g, csv.str());
  return kExitPass;
}

int cmd_herglotz_invert(const Globals& g, const MatrixHerglotz& h, std::vector<double> at) {
  const MatrixFunction m = evaluator(h);
  const RecoveredCD cd = recover_cd(m);
  if (at.empty() && h.omega) at = h.omega->locations();
  Json atoms = Json::array();
  std::vector<Report> reports;
  const double tol = 1e4 * g.tol;
  for (double lambda : at) {
    const PsdMatrix w = stieltjes_invert(m, lambda);
    atoms.push_back(Json{{"lambda", lambda}, {"matrix", io::to_json(w.matrix())}});
  }
  const Matrix c_true = nevanlinna_c(h);
  reports.push_back(Report::make("recover_c", (cd.c - c_true).norm() / std::max(1.0, c_true.norm()), tol));
  reports.push_back(Report::make("recover_d", (cd.d - h.d).norm() / std::max(1.0, h.d.norm()), tol));
  if (h.omega) {
    double err = 0.0;
    for (const Atom& a : h.omega->atoms()) {
      const Matrix got = stieltjes_invert(m, a.lambda).matrix();
      err = std::max(err, (got - a.weight.matrix()).norm() / std::max(1.0, a.weight.norm2()));
    }
    reports.push_back(Report::make("recover_atoms", err, tol));
  }
  Json out{{"c", io::to_json(cd.c)}, {"d", io::to_json(cd.d)}, {"atoms", atoms}, {"residuals", reports_json(reports)}};
  emit(g, io::dump(out) + "\n");
  return exit_for(reports);
}

int cmd_herglotz_scan(const Globals& g, const MatrixHerglotz& h) {
  const ScanResult s = herglotz_scan(evaluator(h), default_grid());
  Json out{{"min_eigenvalue", s.min_eigenvalue},
           {"argmin", Json::array({s.argmin.real(), s.argmin.imag()})},
           {"report", io::to_json(s.report)}};
  emit(g, io::dump(out) + "\n");
  return exit_for({s.report});
}

int cmd_complete(const Globals& g, const std::string& file) {
  const FiniteSemiMetric s = io::semimetric_from_json(io::read_file(file));
  const MetricSpaceResult r2 = route2_quotient(s);
  const MetricSpaceResult r1 = route1_complete_then_quotient(s, constant_sequences(s));
  const Isometry j = isometry_j(r1, r2);
  const std::vector<Report> reports{Report::make("isometry_j", j.max_distortion, 1e-12),
                                    verify_metric_axioms(r2, 1e-12), verify_quotient_well_defined(s, r2, 1e-12)};
  Json classes = Json::array();
  for (const auto& c : r2.classes) classes.push_back(c);
  Json dist = Json::array();
  for (Eigen::Index a = 0; a < r2.dist.rows(); ++a) {
    Json row = Json::array();
    for (Eigen::Index b = 0; b < r2.dist.cols(); ++b) row.push_back(r2.dist(a, b));
    dist.push_back(row);
  }
  Json out{{"classes", classes},
           {"representatives", r2.representatives},
           {"dist", dist},
           {"isometry", Json{{"mapping", j.mapping}, {"max_distortion", j.max_distortion}}},
           {"residuals", reports_json(reports)}};
  emit(g, io::dump(out) + "\n");
  return exit_for(reports);
}

}  // namespace

int main(int argc, char** argv) {
  Globals g;
  if (const char* env = std::getenv("OPMODEL_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0.0)) {
      std::cerr << "error: OPMODEL_TOL must be a positive number\n";
      return kExitInput;
    }
    g.tol = v;
  }

  CLI::App app{"Operator-valued measure models: generation, verification and Herglotz tooling"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", g.seed, "Base seed for instance generation");
  app.add_option("--tol", g.tol, "Base tolerance (overrides OPMODEL_TOL)");
  app.add_option("--count", g.count, "Number of instances");
  app.add_option("--out", g.out, "Output file (directory for gen); stdout when omitted");
  app.add_option("--max-dim", g.caps.max_dim, "Largest measure dimension d");
  app.add_option("--max-atoms", g.caps.max_atoms, "Largest number of atoms");
  app.add_option("--max-n", g.caps.max_n, "Largest perturbation dimension n");
  app.add_option("--max-k", g.caps.max_k, "Largest coupling rank k");
  app.add_option("--threads", g.threads, "Worker threads (0: automatic)");

  std::string kind;
  auto* gen = app.add_subcommand("gen", "Write seeded instances as JSON files");
  gen->add_option("kind", kind, "measures | model | perturbation | herglotz | semimetric | linops")
      ->required()
      ->check(CLI::IsMember({"measures", "model", "perturbation", "herglotz", "semimetric", "linops"}));

  std::string ingest_file;
  std::string rule;
  auto* ingest = app.add_subcommand("ingest", "Convert sampled densities into an atomic measure");
  ingest->add_option("file", ingest_file, "JSON {\"samples\": [{\"lambda\", \"matrix\"}], \"rule\"}")->required();
  ingest->add_option("--rule", rule, "trapezoid | midpoint");

  std::string suite;
  std::string input;
  bool strict = false;
  auto* verify = app.add_subcommand("verify", "Run property suites; JSON-lines reports");
  std::vector<std::string> choices = suite_names();
  choices.push_back("all");
  verify->add_option("suite", suite, "Suite name or all")->required()->check(CLI::IsMember(choices));
  verify->add_option("--input", input, "Check one instance file instead of generated ones");
  verify->add_flag("--strict-covariance", strict, "Also check the pointwise S(B) covariance");

  std::string diag_file;
  auto* diag = app.add_subcommand("diagonalize", "Diagonalize a perturbation instance");
  diag->add_option("file", diag_file, "Perturbation instance JSON")->required();

  std::string hfile;
  std::string hsub;
  bool from_pert = false;
  std::vector<double> at;
  auto* herg = app.add_subcommand("herglotz", "Evaluate, invert or scan a matrix Herglotz function");
  herg->add_option("action", hsub, "eval | invert | scan")->required()->check(CLI::IsMember({"eval", "invert", "scan"}));
  herg->add_option("file", hfile, "Herglotz JSON (or perturbation JSON with --from-perturbation)")->required();
  herg->add_flag("--from-perturbation", from_pert, "Use the m-function of a perturbation instance");
  herg->add_option("--at", at, "Inversion points (default: the atoms in the file)");

  std::string cfile;
  auto* complete = app.add_subcommand("complete", "Quotient and complete a finite semi-metric space");
  complete->add_option("file", cfile, "Semi-metric JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitInput;
  }

  try {
    if (*gen) {
      if (g.out.empty()) throw Error(ErrorKind::InvalidArgument, "gen needs --out DIR");
      return cmd_gen(g, kind, g.out);
    }
    if (*ingest) return cmd_ingest(g, ingest_file, rule);
    if (*verify) return cmd_verify(g, suite, input, strict);
    if (*diag) return cmd_diagonalize(g, diag_file);
    if (*herg) {
      const MatrixHerglotz h = load_herglotz(hfile, from_pert, g.tol);
      if (hsub == "eval") return cmd_herglotz_eval(g, h);
      if (hsub == "invert") return cmd_herglotz_invert(g, h, at);
      return cmd_herglotz_scan(g, h);
    }
    if (*complete) return cmd_complete(g, cfile);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_for(e);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: Parse: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
