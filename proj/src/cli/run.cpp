#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <string>

#include "cli/internal.hpp"
#include "sqg/bilinear/bilinear.hpp"
#include "sqg/cli/experiment.hpp"
#include "sqg/error.hpp"
#include "sqg/illposed/illposed.hpp"
#include "sqg/lp/besov.hpp"
#include "sqg/lp/partition.hpp"
#include "sqg/random.hpp"
#include "sqg/solver/solver.hpp"
#include "sqg/spectral/transform.hpp"

namespace sqg::cli {

namespace {

void at_most(ExperimentReport& r, std::string name, double value, double threshold) {
  r.checks.push_back({std::move(name), value <= threshold, value, "<=", threshold, 0.0});
}

void at_least(ExperimentReport& r, std::string name, double value, double threshold) {
  r.checks.push_back({std::move(name), value >= threshold, value, ">=", threshold, 0.0});
}

void above(ExperimentReport& r, std::string name, double value, double threshold) {
  r.checks.push_back({std::move(name), value > threshold, value, ">", threshold, 0.0});
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

// ---------------------------------------------------------------- partition-check

void partition_check(const ExperimentConfig& c, ExperimentReport& rep) {
  const Json& p = c.params;
  const FrequencyLattice lat = c.lattice();
  const lp::CutProfile profile{p.at("inner").get<double>(), p.at("outer").get<double>()};
  const lp::DyadicPartition part = lp::build_partition(lat, profile);
  const int nj = part.j_max() - part.j_min() + 1;

  struct Stats {
    long points = 0;
    double sum_dev = 0.0, plateau_dev = 0.0, leak = 0.0;
    double lo = 1.0, hi = 0.0;
  };
  std::vector<Stats> st(static_cast<std::size_t>(nj));
  const int kmax = lat.max_wavenumber();
  for (int k1 = -kmax; k1 <= kmax; ++k1) {
    for (int k2 = -kmax; k2 <= kmax; ++k2) {
      if (k1 == 0 && k2 == 0) continue;
      const double r = lat.modulus(k1, k2);
      double sum = 0.0;
      for (int j = part.j_min(); j <= part.j_max(); ++j) sum += part.phi(j, r);
      const double dev = std::abs(sum - 1.0);
      for (int j = part.j_min(); j <= part.j_max(); ++j) {
        Stats& s = st[static_cast<std::size_t>(j - part.j_min())];
        const double phi = part.phi(j, r);
        const double a = std::ldexp(1.0, j);
        if (r >= 0.5 * a && r <= 2.0 * a) {
          ++s.points;
          s.sum_dev = std::max(s.sum_dev, dev);
          s.lo = std::min(s.lo, phi);
          s.hi = std::max(s.hi, phi);
        } else {
          s.leak = std::max(s.leak, std::abs(phi));
        }
        if (r >= 0.875 * a && r <= 1.25 * a) s.plateau_dev = std::max(s.plateau_dev, std::abs(phi - 1.0));
      }
    }
  }

  Table& t = rep.tables.emplace_back(Table{
      "partition",
      {"j", "points", "max_sum_deviation", "max_plateau_deviation", "max_support_leak", "min_phi", "max_phi"},
      {}});
  double sum_dev = 0.0, plateau = 0.0, leak = 0.0, range = 0.0;
  for (int j = part.j_min(); j <= part.j_max(); ++j) {
    const Stats& s = st[static_cast<std::size_t>(j - part.j_min())];
    if (s.points == 0) {
      t.rows.push_back({j, 0, 0.0, 0.0, s.leak, nullptr, nullptr});
    } else {
      t.rows.push_back({j, s.points, s.sum_dev, s.plateau_dev, s.leak, s.lo, s.hi});
      range = std::max({range, -s.lo, s.hi - 1.0});
    }
    sum_dev = std::max(sum_dev, s.sum_dev);
    plateau = std::max(plateau, s.plateau_dev);
    leak = std::max(leak, s.leak);
  }

  std::mt19937_64 rng(c.seed);
  Table& rec = rep.tables.emplace_back(Table{"reconstruction", {"field", "relative_error"}, {}});
  double rec_err = 0.0;
  for (int i = 0; i < p.at("reconstruction_fields").get<int>(); ++i) {
    const SpectralField f = random_field(lat, 0.0, 2.0 * lat.nyquist(), rng);
    SpectralField sum(lat);
    for (int j = part.j_min(); j <= part.j_max(); ++j) sum += lp::shell_project(f, part, j);
    const double e = relative_distance(sum, f);
    rec.rows.push_back({i, e});
    rec_err = std::max(rec_err, e);
  }

  const double tol = p.at("tolerance");
  rep.summary["j_min"] = part.j_min();
  rep.summary["j_max"] = part.j_max();
  at_most(rep, "partition_of_unity", sum_dev, tol);
  at_most(rep, "plateau", plateau, tol);
  at_most(rep, "support", leak, tol);
  at_most(rep, "range", range, tol);
  at_most(rep, "reconstruction", rec_err, tol);
}

// ---------------------------------------------------------------- verify-identity

void verify_identity(const ExperimentConfig& c, ExperimentReport& rep) {
  const Json& p = c.params;
  const FrequencyLattice lat = c.lattice();
  const double lo = p.at("r_min");
  const double hi = p.at("r_max").is_null() ? 2.0 * lat.nyquist() : p.at("r_max").get<double>();
  const auto index = lp::BesovIndex::solution(p.at("p"), exponent_value(p.at("q")));
  std::mt19937_64 rng(c.seed);
  Table& t = rep.tables.emplace_back(
      Table{"identity", {"field", "quadrature_block", "quadrature_diagonal", "block_diagonal"}, {}});
  double worst = 0.0;
  for (int i = 0; i < p.at("fields").get<int>(); ++i) {
    SpectralField th = random_field(lat, lo, hi, rng, p.at("slope"));
    th *= 1.0 / lp::besov_norm(th, index);
    const auto a = bilinear::bee(th, th);
    const auto b = bilinear::bee_block(th, th);
    const auto d = bilinear::bee_diag_fast(th);
    const double ab = relative_distance(a, b), ad = relative_distance(a, d), bd = relative_distance(b, d);
    t.rows.push_back({i, ab, ad, bd});
    worst = std::max({worst, ab, ad, bd});
  }
  rep.summary["max_discrepancy"] = worst;
  at_most(rep, "three_way_discrepancy", worst, p.at("tolerance"));
}

// ---------------------------------------------------------------- constants

solver::ConstantsReport measure_constants(const FrequencyLattice& lat, int samples, double p, double q,
                                          std::uint64_t seed, const Json& lo, const Json& hi) {
  solver::ConstantsOptions o;
  o.p = p;
  o.q = q;
  o.seed = seed;
  if (!lo.is_null()) o.shell_low = lo.get<int>();
  if (!hi.is_null()) o.shell_high = hi.get<int>();
  return solver::estimate_constants(lat, samples, o);
}

void constants(const ExperimentConfig& c, ExperimentReport& rep) {
  const Json& p = c.params;
  const auto k = measure_constants(c.lattice(), p.at("samples"), p.at("p"), exponent_value(p.at("q")),
                                   c.seed, p.at("shell_low"), p.at("shell_high"));
  rep.tables.push_back(Table{"constants",
                             {"C0", "C1", "delta0", "epsilon0", "samples", "shell_low", "shell_high"},
                             {{k.c0, k.c1, k.delta0, k.epsilon0, k.samples, k.shell_low, k.shell_high}}});
  above(rep, "C0", k.c0, 0.0);
  above(rep, "C1", k.c1, 0.0);
  above(rep, "delta0", k.delta0, 0.0);
}

// ---------------------------------------------------------------- solve

void solve(const ExperimentConfig& c, ExperimentReport& rep) {
  const Json& p = c.params;
  const Json& fp = p.at("forcing");
  const FrequencyLattice lat = c.lattice();
  const solver::SolveConfig cfg = solver_config(c);

  double target = 0.0;
  if (fp.at("data_norm").is_null()) {
    const auto k = measure_constants(lat, fp.at("samples"), p.at("p"), exponent_value(p.at("q")), c.seed,
                                     nullptr, nullptr);
    rep.summary["C0"] = k.c0;
    rep.summary["C1"] = k.c1;
    rep.summary["delta0"] = k.delta0;
    target = fp.at("delta0_fraction").get<double>() * k.delta0;
  } else {
    target = fp.at("data_norm");
  }
  std::mt19937_64 rng(c.seed);
  SpectralField f = random_field(lat, fp.at("r_min"), fp.at("r_max"), rng, fp.at("slope"));
  f *= target / lp::besov_norm(f, cfg.data_index());

  const auto res = solver::picard_solve(f, cfg);
  const auto& tr = res.trace;
  Table& t = rep.tables.emplace_back(
      Table{"trace", {"iteration", "norm", "residual", "ratio", "pde_residual"}, {}});
  for (const auto& r : tr.records)
    t.rows.push_back({r.iteration, r.norm, r.residual, r.ratio, number_or_null(r.pde_residual)});

  rep.summary["data_norm"] = tr.data_norm;
  rep.summary["verdict"] = solver::to_string(tr.verdict);
  rep.summary["iterations"] = static_cast<int>(tr.records.size());
  rep.summary["solution_norm"] = tr.records.empty() ? 0.0 : tr.records.back().norm;
  if (!tr.message.empty()) rep.summary["message"] = tr.message;

  const double tol = p.at("residual_tolerance");
  at_least(rep, "converged", tr.verdict == solver::Verdict::converged ? 1.0 : 0.0, 1.0);
  at_most(rep, "fixed_point_residual", tr.fixed_point_residual, tol);
  at_most(rep, "pde_residual", tr.pde_residual, tol);
  if (tr.records.size() >= 2) at_most(rep, "contraction_ratio", tr.max_ratio(2), p.at("ratio_threshold"));
}

// ---------------------------------------------------------------- illpose-step1

void step1(const ExperimentConfig& c, ExperimentReport& rep) {
  const Json& p = c.params;
  const FrequencyLattice lat = c.lattice();
  illposed::Step1Options o;
  o.delta = p.at("delta");
  o.p = p.at("p");
  o.q = exponent_value(p.at("q"));
  o.solve = solver_config(c);
  o.solve.pde_residual_each_iteration = false;
  o.solve_perturbation = p.at("solve_perturbation");
  if (!p.at("j_low").is_null()) o.j_low = p.at("j_low").get<int>();
  o.j_high = p.at("j_high");

  Table& t = rep.tables.emplace_back(Table{
      "step1",
      {"N", "data_norm", "theta1_norm", "theta2_norm", "lowfreq_bound", "lowfreq_constant",
       "perturbation_norm", "perturbation_ratio", "verdict", "iterations", "pde_residual"},
      {}});
  std::vector<illposed::Step1Row> rows;
  for (int N : p.at("N").get<std::vector<int>>()) {
    const auto r = illposed::step1_run(lat, N, o);
    rows.push_back(r);
    t.rows.push_back({r.N, r.data_norm, r.theta1_norm, r.theta2_norm, r.lowfreq_bound, r.lowfreq_constant,
                      number_or_null(r.perturbation_norm), number_or_null(r.perturbation_ratio),
                      o.solve_perturbation ? solver::to_string(r.verdict) : "skipped", r.iterations,
                      number_or_null(r.pde_residual)});
  }

  // Critical data norm of delta 2^{5N/2} chi cos(2^N x1) scales as 2^{(2/p - 1/2) N}.
  const double slope = 2.0 / o.p - 0.5;
  double ratio_dev = 0.0, cmin = lp::infinity, cmax = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    cmin = std::min(cmin, rows[i].lowfreq_constant);
    cmax = std::max(cmax, rows[i].lowfreq_constant);
    if (i == 0) continue;
    const double expect = std::exp2(slope * (rows[i].N - rows[i - 1].N));
    ratio_dev = std::max(ratio_dev, std::abs(rows[i].data_norm / rows[i - 1].data_norm / expect - 1.0));
  }
  rep.summary["data_norm_slope"] = slope;
  if (rows.size() >= 2) at_most(rep, "data_norm_ratio", ratio_dev, p.at("data_ratio_tolerance"));
  above(rep, "lowfreq_constant_min", cmin, 0.0);
  at_most(rep, "lowfreq_variation", cmax / cmin - 1.0, p.at("lowfreq_variation"));
  if (o.solve_perturbation) {
    double worst_ratio = 0.0, worst_res = 0.0, converged = 1.0;
    for (const auto& r : rows) {
      worst_ratio = std::max(worst_ratio, r.perturbation_ratio);
      worst_res = std::max(worst_res, r.pde_residual);
      if (r.verdict != solver::Verdict::converged) converged = 0.0;
    }
    at_least(rep, "perturbation_converged", converged, 1.0);
    at_most(rep, "perturbation_ratio", worst_ratio, p.at("perturbation_fraction"));
    at_most(rep, "pde_residual", worst_res, p.at("residual_tolerance"));
  }
}

// ---------------------------------------------------------------- illpose-step2

void step2(const ExperimentConfig& c, ExperimentReport& rep) {
  const Json& p = c.params;
  const FrequencyLattice lat = c.lattice();
  const illposed::ForceSpec spec = force_spec(c, p.at("N"));
  const double pp = p.at("p");

  Table& terms = rep.tables.emplace_back(Table{"terms", {"n", "shell"}, {}});
  for (int n = spec.block_low; n <= spec.block_high; ++n) terms.rows.push_back({n, spec.exponent(n)});

  const SpectralField f = illposed::force_step2(lat, spec);
  const auto it = illposed::second_iterate(f);

  Table& norms = rep.tables.emplace_back(Table{"norms", {"q", "data_norm", "theta1_norm", "theta2_norm"}, {}});
  for (const auto& qj : p.at("q")) {
    const double q = exponent_value(qj);
    const auto d = lp::BesovIndex::data(pp, q);
    const auto s = lp::BesovIndex::solution(pp, q);
    lp::NormOptions opt;
    opt.oversample = lp::exact_oversample(f, pp);
    lp::NormOptions opt2;
    opt2.oversample = lp::exact_oversample(it.theta2, pp);
    norms.rows.push_back({qj, lp::besov_norm(f, d, opt), lp::besov_norm(it.theta1, s, opt),
                          lp::besov_norm(it.theta2, s, opt2)});
  }

  const lp::DyadicPartition part = lp::build_partition(lat);
  const int j_low = p.at("j_low").is_null() ? part.j_min() : p.at("j_low").get<int>();
  const double bound = illposed::lowfreq_lower_bound(it.theta2, part, j_low, p.at("j_high"));
  rep.summary["lowfreq_bound"] = bound;
  rep.summary["lowfreq_constant"] = bound / (spec.delta * spec.delta);

  const auto probes = illposed::quadrant_probes(lat, p.at("probe_radius"));
  const auto split = illposed::iterate2_split(it.theta1, probes);
  double scale = 0.0;
  for (const auto& s : split) scale = std::max(scale, std::abs(it.theta2.at(s.k1, s.k2)));
  const double sign = solver::sign_value(solver::NonlinearSign::pde);
  Table& t = rep.tables.emplace_back(
      Table{"split",
            {"k1", "k2", "main_re", "main_im", "cross_abs", "perp_abs", "total_re", "total_im", "direct_re",
             "direct_im", "discrepancy"},
            {}});
  double worst = 0.0;
  int definite = 0;
  for (const auto& s : split) {
    const complex total = sign * s.total();
    const complex direct = it.theta2.at(s.k1, s.k2);
    const double d = scale > 0.0 ? std::abs(total - direct) / scale : std::abs(total - direct);
    worst = std::max(worst, d);
    if (s.main.real() * s.k1 * s.k2 > 0.0) ++definite;
    t.rows.push_back({s.k1, s.k2, s.main.real(), s.main.imag(), std::abs(s.cross), std::abs(s.perp),
                      total.real(), total.imag(), direct.real(), direct.imag(), d});
  }
  at_most(rep, "split_consistency", worst, p.at("split_tolerance"));
  at_least(rep, "main_term_sign", static_cast<double>(definite) / static_cast<double>(split.size()), 1.0);
  above(rep, "lowfreq_bound", bound, 0.0);
}

// ---------------------------------------------------------------- illpose-step3

void step3(const ExperimentConfig& c, ExperimentReport& rep) {
  const Json& p = c.params;
  const FrequencyLattice lat = c.lattice();
  illposed::ForceSpec spec = force_spec(c, p.at("N"));
  const auto forcing = illposed::force_step3(lat, spec);
  spec.stride = forcing.stride;

  std::vector<double> qs;
  for (const auto& q : p.at("qs")) qs.push_back(exponent_value(q));
  const auto inf = illposed::step3_inflation(lat, spec, qs, lp::BesovIndex::data(p.at("p"), exponent_value(p.at("q"))));

  Table& t = rep.tables.emplace_back(Table{"inflation", {"n", "shell", "value"}, {}});
  for (const auto& e : inf.entries) t.rows.push_back({e.n, e.shell, e.value});
  Table& a = rep.tables.emplace_back(Table{"aggregates", {"q", "value"}, {}});
  for (std::size_t i = 0; i < qs.size(); ++i) a.rows.push_back({p.at("qs")[i], inf.aggregates[i].second});

  const int blocks = spec.block_high - spec.block_low + 1;
  rep.summary["blocks"] = blocks;
  rep.summary["carrier"] = spec.carrier_exponent();
  rep.summary["stride"] = forcing.stride;
  rep.summary["envelope_l4"] = forcing.envelope_l4;
  rep.summary["block_l4_sum"] = forcing.block_l4_sum;
  rep.summary["data_norm"] = inf.data_norm;
  rep.summary["lowfreq_bound"] = inf.lowfreq_bound;

  const double overlap = std::pow(forcing.envelope_l4, 4) / forcing.block_l4_sum;
  at_most(rep, "envelope_overlap", std::abs(overlap - 1.0), spec.overlap_tolerance);
  const bool has1 = std::find(qs.begin(), qs.end(), 1.0) != qs.end();
  const bool has2 = std::find(qs.begin(), qs.end(), 2.0) != qs.end();
  if (blocks >= 2 && has1 && has2) {
    const double r = inf.aggregate(1.0) / inf.aggregate(2.0);
    rep.summary["l1_l2_ratio"] = r;
    at_most(rep, "l1_l2_growth", std::abs(r / std::sqrt(static_cast<double>(blocks)) - 1.0),
            p.at("inflation_tolerance"));
  }
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentReport rep;
  rep.config = config;
  spectral::set_fft_threads(config.threads);
  const auto start = std::chrono::steady_clock::now();
  try {
    const double need = illposed::working_set_bytes(config.lattice_size);
    if (need > static_cast<double>(illposed::memory_budget())) {
      throw ResourceLimit("lattice M = " + std::to_string(config.lattice_size) + " needs about " +
                          std::to_string(static_cast<long long>(need / (1 << 20))) + " MiB of working memory");
    }
    switch (config.experiment) {
      case Experiment::partition_check: partition_check(config, rep); break;
      case Experiment::verify_identity: verify_identity(config, rep); break;
      case Experiment::constants: constants(config, rep); break;
      case Experiment::solve: solve(config, rep); break;
      case Experiment::illpose_step1: step1(config, rep); break;
      case Experiment::illpose_step2: step2(config, rep); break;
      case Experiment::illpose_step3: step3(config, rep); break;
    }
  } catch (const ResourceLimit& e) {
    rep.aborted = e.what();
    rep.checks.clear();
  }
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

bool ExperimentReport::passed() const {
  if (aborted) return false;
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

Table& ExperimentReport::table(const std::string& name) {
  for (auto& t : tables)
    if (t.name == name) return t;
  throw PreconditionError("report has no table '" + name + "'");
}

const Table& ExperimentReport::table(const std::string& name) const {
  for (const auto& t : tables)
    if (t.name == name) return t;
  throw PreconditionError("report has no table '" + name + "'");
}

}  // namespace sqg::cli
