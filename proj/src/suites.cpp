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

#include "opmodel/suites.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

namespace opmodel {

namespace {

constexpr std::array<double, 5> kAlphas{0.1, 0.2, 0.3, 0.4, 0.5};

using Checks = std::vector<Report>;

Complex upper_point(Rng& rng) { return {rng.uniform(-6.0, 6.0), std::exp(rng.uniform(std::log(1e-2), std::log(10.0)))}; }

std::vector<BorelSet> probe_sets(Rng& rng, std::size_t count) {
  std::vector<BorelSet> sets;
  for (std::size_t i = 0; i < count; ++i) sets.push_back(gen::random_borel_set(rng));
  return sets;
}

// ---- linops ----------------------------------------------------------------

struct OrderedPair {
  Matrix f;
  Matrix g;
};

Checks check_linops(const OrderedPair& p, const RunConfig& cfg) {
  Checks out;
  const PsdMatrix f = validate_psd(p.f, cfg.tol);
  const PsdMatrix g = validate_psd(p.g, cfg.tol);
  const double heinz_tol = 100.0 * cfg.tol;
  for (double alpha : kAlphas) {
    const double c = heinz_contraction(f, g, alpha);
    out.push_back(Report::make("heinz_contraction", std::max(0.0, c - 1.0), heinz_tol));
    out.push_back(Report::make("range_inclusion", range_inclusion_residual(f, g, alpha), heinz_tol));
  }
  const double scale = std::max(g.norm2(), 1e-300);
  const Matrix root = frac_power(g, 0.5).matrix();
  out.push_back(Report::make("frac_power_square", (root * root - g.matrix()).norm() / scale, cfg.tol));
  const Matrix third = frac_power(g, 1.0 / 3.0).matrix();
  out.push_back(Report::make("frac_power_cube", (third * third * third - g.matrix()).norm() / scale, cfg.tol));
  const Matrix pinv = pinv_power(g, 1.0).matrix();
  out.push_back(Report::make("pinv_reproduces", (g.matrix() * pinv * g.matrix() - g.matrix()).norm() / scale,
                             cfg.tol));
  return out;
}

// ---- measures --------------------------------------------------------------

Checks check_measures(const AtomicOperatorMeasure& sigma, Rng& rng, const RunConfig& cfg) {
  Checks out;
  const auto probes = probe_sets(rng, 4);
  out.push_back(verify_monotone_bound(sigma, probes, cfg.tol));

  double add = 0.0;
  const double scale = std::max(total(sigma).norm2(), 1e-300);
  for (std::size_t i = 0; i + 1 < probes.size(); ++i) {
    const BorelSet& a = probes[i];
    const BorelSet& b = probes[i + 1];
    const Matrix lhs = evaluate_matrix(sigma, a.unite(b)) + evaluate_matrix(sigma, a.intersect(b));
    const Matrix rhs = evaluate_matrix(sigma, a) + evaluate_matrix(sigma, b);
    add = std::max(add, (lhs - rhs).norm() / scale);
  }
  out.push_back(Report::make("finite_additivity", add, cfg.tol));

  const ScalarMeasure mu = control_measure(sigma, Matrix::Identity(sigma.dim(), sigma.dim()));
  double mass = 0.0;
  for (double m : mu.masses) mass += m;
  double expected = 0.0;
  const Matrix t = total(sigma).matrix();
  for (Eigen::Index n = 0; n < t.rows(); ++n) expected += std::ldexp(t(n, n).real(), -static_cast<int>(n) - 1);
  out.push_back(Report::make("control_total", std::abs(mass - expected) / std::max(expected, 1e-300), cfg.tol));

  const KernelSplit split = kernel_split(total(sigma));
  out.push_back(verify_kernel_inclusion(sigma, split, 1e-2 * cfg.tol));
  out.push_back(block_check(sigma, split, 1e-2 * cfg.tol, probes));
  return out;
}

// ---- model -----------------------------------------------------------------

// ‖P_ker Λ − P_ker T‖_F with ker Λ read off the coordinate matrix of Λ.
double lambda_kernel_residual(const ModelSpace& ms) {
  const Eigen::Index d = ms.dim();
  Matrix lam(ms.total_dim, d);
  for (Eigen::Index n = 0; n < d; ++n) lam.col(n) = coordinates(ms, lambda_embed(ms, Matrix::Identity(d, d).col(n)));
  Eigen::JacobiSVD<Matrix> svd(lam, Eigen::ComputeFullV);
  const RealVector& s = svd.singularValues();
  const double cut = s.size() ? ms.sigma.tol() * s(0) : 0.0;
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > cut) ++rank;
  const Matrix null = svd.matrixV().rightCols(d - rank);
  return (null * null.adjoint() - ms.split.k0 * ms.split.k0.adjoint()).norm();
}

Checks check_model(const AtomicOperatorMeasure& sigma, Rng& rng, const RunConfig& cfg) {
  Checks out;
  const Eigen::Index d = sigma.dim();
  const ModelSpace ms = build_model(sigma, cfg.tol);
  out.push_back(verify_gram_lambda(ms, Matrix::Identity(d, d), cfg.tol));
  out.push_back(Report::make("lambda_kernel", lambda_kernel_residual(ms), 1e-2 * cfg.tol));
  out.push_back(Report::make("s_identity_on_real_line",
                             (s_operator(ms, BorelSet::real_line()) - Matrix::Identity(d, d)).norm(), 0.0));
  for (const BorelSet& b : probe_sets(rng, 3)) {
    const Vector eta = gen::random_vector(rng, d);
    const Vector xi = gen::random_vector(rng, d);
    out.push_back(verify_parseval(ms, b, eta, xi, cfg.tol));
    out.push_back(verify_s_intertwining(ms, b, 10.0 * cfg.tol));
    out.push_back(verify_s_contraction(ms, b, cfg.tol));
    out.push_back(verify_covariance_gram(ms, b, cfg.tol));
    if (cfg.strict_covariance) out.push_back(verify_multiplication_covariance(ms, b, xi, cfg.tol));
  }
  out.push_back(verify_berezanskii(ms, gen::random_step_function(rng, d), 1e-2 * cfg.tol));
  out.push_back(verify_uniqueness(sigma, Matrix::Identity(d, d), gen::random_unitary(rng, d), 0.1 * cfg.tol));
  Matrix kop = gen::complex_gaussian(rng, d, d) + 2.0 * Matrix::Identity(d, d);
  out.push_back(gelfand_kostyuchenko_check(sigma, kop, 1e3 * cfg.tol, probe_sets(rng, 2)));
  return out;
}

// ---- perturbation ----------------------------------------------------------

Matrix orthonormal_columns(const Matrix& k) {
  Eigen::HouseholderQR<Matrix> qr(k);
  return qr.householderQ() * Matrix::Identity(k.rows(), k.cols());
}

Checks check_perturbation(const PerturbationInstance& inst, Rng& rng, const RunConfig& cfg) {
  Checks out;
  const Matrix hl = build_hl(inst);
  out.push_back(verify_omega_total(inst, 1e-2 * cfg.tol));
  out.push_back(verify_spectral_family(spectral_family(hl, cfg.tol), hl, 10.0 * cfg.tol));
  for (int i = 0; i < 4; ++i) {
    const Complex z = upper_point(rng);
    out.push_back(verify_m_function(inst, z, cfg.tol));
    out.push_back(verify_m_herglotz(inst, z, cfg.tol));
  }
  const DiagonalizationReport diag = verify_diagonalization(inst, 10.0 * cfg.tol, cfg.tol);
  out.push_back(diag.isometry);
  out.push_back(diag.coisometry);
  out.push_back(diag.conjugation);
  out.push_back(diag.spectral_pullback);

  const Matrix nbasis = orthonormal_columns(inst.kmap);
  out.push_back(verify_wt_normalization(hl, nbasis, cfg.tol));
  out.push_back(verify_wt_representation(hl, nbasis, upper_point(rng), 10.0 * cfg.tol));
  const ScanResult scan = herglotz_scan(
      [&](Complex z) { return weyl_titchmarsh(hl, nbasis, z); }, default_grid());
  out.push_back(scan.report);
  return out;
}

// ---- herglotz --------------------------------------------------------------

Checks check_herglotz(const MatrixHerglotz& h, const RunConfig& cfg) {
  Checks out;
  const double tol = 1e4 * cfg.tol;
  const MatrixFunction m = evaluator(h);
  const RecoveredCD cd = recover_cd(m);
  const Matrix c_true = nevanlinna_c(h);
  out.push_back(Report::make("recover_c", (cd.c - c_true).norm() / std::max(1.0, c_true.norm()), tol));
  out.push_back(Report::make("recover_d", (cd.d - h.d).norm() / std::max(1.0, h.d.norm()), tol));
  double atoms_err = 0.0;
  double gap_mass = 0.0;
  if (h.omega) {
    const auto& atoms = h.omega->atoms();
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      const Matrix& w = atoms[j].weight.matrix();
      const Matrix got = stieltjes_invert(m, atoms[j].lambda).matrix();
      atoms_err = std::max(atoms_err, (got - w).norm() / std::max(1.0, w.norm()));
      const double gap = j + 1 < atoms.size() ? 0.5 * (atoms[j].lambda + atoms[j + 1].lambda) : atoms[j].lambda + 1.0;
      gap_mass = std::max(gap_mass, stieltjes_invert(m, gap).matrix().norm());
    }
  }
  out.push_back(Report::make("recover_atoms", atoms_err, tol));
  out.push_back(Report::make("no_mass_between_atoms", gap_mass, tol));
  out.push_back(herglotz_scan(m, default_grid()).report);
  return out;
}

// ---- completion ------------------------------------------------------------

Checks check_completion(const FiniteSemiMetric& s, Rng& rng, const RunConfig& cfg) {
  Checks out;
  const double tol = 1e-2 * cfg.tol;
  const MetricSpaceResult r2 = route2_quotient(s);
  std::vector<CauchySequence> seqs = constant_sequences(s);
  const auto n = static_cast<std::int64_t>(s.size());
  for (int i = 0; i < 3; ++i) {
    CauchySequence seq;
    for (std::int64_t k = rng.integer(0, 4); k > 0; --k) seq.stem.push_back(static_cast<std::size_t>(rng.integer(0, n - 1)));
    seq.tail = static_cast<std::size_t>(rng.integer(0, n - 1));
    seqs.push_back(seq);
  }
  const MetricSpaceResult r1 = route1_complete_then_quotient(s, seqs);
  const Isometry j = isometry_j(r1, r2, tol);
  out.push_back(Report::make("isometry_j", j.max_distortion, tol));
  out.push_back(Report::make("class_count", std::abs(static_cast<double>(r1.classes.size()) -
                                                     static_cast<double>(r2.classes.size())), 0.0));
  out.push_back(verify_metric_axioms(r2, tol));
  out.push_back(verify_metric_axioms(r1, tol));
  out.push_back(verify_quotient_well_defined(s, r2, tol));
  return out;
}

// ---- dispatch --------------------------------------------------------------

std::uint64_t suite_field(const std::string& suite) {
  if (suite == "linops") return field::kHeinz;
  if (suite == "measures") return field::kMeasure;
  if (suite == "model") return field::kBasis;
  if (suite == "perturbation") return field::kPerturbation;
  if (suite == "herglotz") return field::kHerglotz;
  if (suite == "completion") return field::kSemiMetric;
  throw Error(ErrorKind::InvalidArgument, "unknown suite \"" + suite + "\"");
}

// Checks for one instance given as JSON. Probes come from `probes`.
Checks run_checks(const std::string& suite, const io::Json& j, Rng& probes, const RunConfig& cfg) {
  if (suite == "linops") {
    return check_linops({io::matrix_from_json(j.at("f")), io::matrix_from_json(j.at("g"))}, cfg);
  }
  if (suite == "measures") return check_measures(io::measure_from_json(j, cfg.tol), probes, cfg);
  if (suite == "model") return check_model(io::measure_from_json(j, cfg.tol), probes, cfg);
  if (suite == "perturbation") return check_perturbation(io::perturbation_from_json(j, cfg.tol), probes, cfg);
  if (suite == "herglotz") return check_herglotz(io::herglotz_from_json(j, cfg.tol), cfg);
  if (suite == "completion") return check_completion(io::semimetric_from_json(j), probes, cfg);
  throw Error(ErrorKind::InvalidArgument, "unknown suite \"" + suite + "\"");
}

std::vector<VerificationReport> label(const std::string& suite, std::size_t index, const std::string& fingerprint,
                                      const Checks& checks) {
  std::vector<VerificationReport> out;
  for (std::size_t c = 0; c < checks.size(); ++c) out.push_back({suite, index, c, checks[c], fingerprint});
  return out;
}

std::string fingerprint(const RunConfig& cfg, std::size_t index, const io::Json& instance) {
  return "s" + std::to_string(cfg.seed) + "-i" + std::to_string(index) + "-" +
         io::hex64(io::fnv1a(io::dump(instance)));
}

std::vector<VerificationReport> run_one(const std::string& suite, const RunConfig& cfg, std::size_t index) {
  io::Json instance;
  std::string fp = "s" + std::to_string(cfg.seed) + "-i" + std::to_string(index) + "-unavailable";
  try {
    instance = generate_instance(suite, cfg, index);
    fp = fingerprint(cfg, index, instance);
    Rng probes(cfg.seed, index, field::kProbe);
    return label(suite, index, fp, run_checks(suite, instance, probes, cfg));
  } catch (const Error& e) {
    Report r = Report::make("error:" + std::string(to_string(e.kind())), kInf, 0.0, e.kind());
    return label(suite, index, fp, {r});
  }
}

}  // namespace

void RunConfig::validate() const {
  if (!(tol > 0.0) || !std::isfinite(tol)) throw Error(ErrorKind::InvalidArgument, "tol must be positive");
  if (caps.max_dim < 1 || caps.max_atoms < 1 || caps.max_n < 1 || caps.max_k < 1) {
    throw Error(ErrorKind::InvalidArgument, "caps must be at least 1");
  }
}

std::string to_json_line(const VerificationReport& r) {
  io::Json j{{"suite", r.suite}, {"instance", r.instance}, {"check", r.check}};
  const io::Json report = io::to_json(r.report);
  for (const auto& [k, v] : report.items()) j[k] = v;
  j["fingerprint"] = r.fingerprint;
  return io::dump(j);
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"linops", "measures", "model", "perturbation", "herglotz", "completion"};
  return names;
}

io::Json generate_instance(const std::string& suite, const RunConfig& cfg, std::size_t index) {
  Rng rng(cfg.seed, index, suite_field(suite));
  const gen::MeasureCaps mcaps{cfg.caps.max_dim, cfg.caps.max_atoms};
  if (suite == "linops") {
    const auto [f, g] = gen::random_ordered_pair(rng, std::max<Eigen::Index>(cfg.caps.max_dim, 8));
    return io::Json{{"f", io::to_json(f)}, {"g", io::to_json(g)}};
  }
  if (suite == "measures" || suite == "model") {
    const bool forced = index % 2 == 1 && cfg.caps.max_dim >= 2;
    return io::to_json(gen::random_measure(rng, mcaps, forced));
  }
  if (suite == "perturbation") return io::to_json(gen::random_perturbation(rng, cfg.caps.max_n, cfg.caps.max_k));
  if (suite == "herglotz") return io::to_json(gen::random_herglotz(rng, cfg.caps.max_k, cfg.caps.max_atoms));
  return io::to_json(gen::random_semimetric(rng, 12));
}

std::vector<VerificationReport> run_suite(const std::string& suite, const RunConfig& cfg) {
  cfg.validate();
  suite_field(suite);
  std::vector<std::vector<VerificationReport>> slots(cfg.count);
  unsigned workers = cfg.threads ? cfg.threads : std::min(8u, std::max(1u, std::thread::hardware_concurrency()));
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(cfg.count, 1)));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cfg.count; i = next++) slots[i] = run_one(suite, cfg, i);
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  std::vector<VerificationReport> out;
  for (auto& s : slots) std::move(s.begin(), s.end(), std::back_inserter(out));
  return out;
}

std::vector<VerificationReport> run_verify(const std::string& suite, const RunConfig& cfg) {
  if (suite != "all") return run_suite(suite, cfg);
  std::vector<VerificationReport> out;
  for (const auto& name : suite_names()) {
    auto part = run_suite(name, cfg);
    std::move(part.begin(), part.end(), std::back_inserter(out));
  }
  return out;
}

std::vector<VerificationReport> verify_instance(const std::string& suite, const io::Json& instance,
                                                const RunConfig& cfg) {
  cfg.validate();
  suite_field(suite);
  Rng probes(cfg.seed, 0, field::kProbe);
  Checks checks;
  try {
    checks = run_checks(suite, instance, probes, cfg);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, e.what());
  }
  return label(suite, 0, fingerprint(cfg, 0, instance), checks);
}

AtomicOperatorMeasure ingest_density(const std::vector<std::pair<double, Matrix>>& samples, QuadratureRule rule,
                                     double tol) {
  if (samples.size() < 2) throw Error(ErrorKind::InvalidArgument, "need at least two samples");
  const Eigen::Index d = samples.front().second.rows();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i].first)) throw Error(ErrorKind::InvalidArgument, "sample location is not finite");
    if (i > 0 && !(samples[i].first > samples[i - 1].first)) {
      throw Error(ErrorKind::UnsortedSamples, "sample locations must be strictly increasing");
    }
    validate_psd(samples[i].second, tol);
    if (samples[i].second.rows() != d) throw Error(ErrorKind::DimensionMismatch, "density samples differ in size");
  }
  std::vector<std::pair<double, Matrix>> atoms;
  const std::size_t n = samples.size();
  if (rule == QuadratureRule::Trapezoid) {
    for (std::size_t i = 0; i < n; ++i) {
      const double left = i > 0 ? samples[i].first - samples[i - 1].first : 0.0;
      const double right = i + 1 < n ? samples[i + 1].first - samples[i].first : 0.0;
      atoms.emplace_back(samples[i].first, 0.5 * (left + right) * samples[i].second);
    }
  } else {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const auto& [a, ra] = samples[i];
      const auto& [b, rb] = samples[i + 1];
      atoms.emplace_back(0.5 * (a + b), 0.5 * (b - a) * (ra + rb));
    }
  }
  return AtomicOperatorMeasure::create(d, atoms, tol);
}

}  // namespace opmodel
