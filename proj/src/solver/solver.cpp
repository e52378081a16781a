#include "sqg/solver/solver.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>

#include <json.hpp>

#include "sqg/bilinear/bilinear.hpp"
#include "sqg/error.hpp"
#include "sqg/random.hpp"
#include "sqg/spectral/operators.hpp"

namespace sqg::solver {

namespace sp = sqg::spectral;
namespace bl = sqg::bilinear;

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

bool finite_field(const SpectralField& f) { return std::isfinite(f.max_abs()); }

double relative(double num, double den) { return den > 0.0 ? num / den : num; }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

SpectralField minus_laplacian(const SpectralField& f) {
  return sp::apply_symbol(f, sp::MultiplierSpec::power(2.0));
}

// Runs theta_{n+1} = step(theta_n) and fills the trace. pde(theta) returns the
// PDE residual of the current iterate.
template <class Step, class Pde>
SolveResult iterate(SpectralField theta, const SolveConfig& config, Step&& step, Pde&& pde) {
  SolveResult result{theta, {}};
  double previous = 0.0;
  for (int n = 1; n <= config.max_iter; ++n) {
    SpectralField next = step(theta);
    if (!finite_field(next)) {
      result.trace.verdict = Verdict::diverged;
      result.trace.message = "non-finite iterate at iteration " + std::to_string(n);
      break;
    }
    const double norm = lp::besov_norm(next, config.index);
    const double abs_res = lp::besov_norm(next - theta, config.index);
    IterationRecord rec{n, norm, relative(abs_res, norm),
                        n == 1 || previous == 0.0 ? 0.0 : abs_res / previous,
                        config.pde_residual_each_iteration ? pde(next) : nan};
    previous = abs_res;
    theta = std::move(next);
    result.trace.records.push_back(rec);
    if (!std::isfinite(norm) || norm > config.blowup) {
      result.trace.verdict = Verdict::diverged;
      result.trace.message = "iterate norm exceeded " + fmt(config.blowup) + " at iteration " +
                             std::to_string(n);
      break;
    }
    if (rec.residual <= config.tol) {
      result.trace.verdict = Verdict::converged;
      result.trace.message = "converged after " + std::to_string(n) + " iterations";
      break;
    }
  }
  if (result.trace.records.size() == static_cast<std::size_t>(config.max_iter) &&
      result.trace.verdict == Verdict::max_iterations) {
    result.trace.message = "no convergence within " + std::to_string(config.max_iter) + " iterations";
  }
  result.theta = std::move(theta);
  return result;
}

}  // namespace

lp::BesovIndex SolveConfig::data_index() const { return {index.s - 2.0, index.p, index.q}; }

void SolveConfig::validate() const {
  if (!(tol > 0.0)) throw PreconditionError("solver tolerance must be positive");
  if (max_iter < 1) throw PreconditionError("solver max_iter must be >= 1");
  if (!(blowup > 0.0)) throw PreconditionError("solver blow-up bound must be positive");
}

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::converged:
      return "converged";
    case Verdict::max_iterations:
      return "max_iterations";
    case Verdict::diverged:
      return "diverged";
  }
  return "unknown";
}

double IterationTrace::max_ratio(int from) const {
  double m = 0.0;
  for (const auto& r : records) {
    if (r.iteration >= from) m = std::max(m, r.ratio);
  }
  return m;
}

double pde_residual(const SpectralField& theta, const SpectralField& f,
                    const lp::BesovIndex& data_index) {
  SpectralField r = minus_laplacian(theta);
  r += bl::advection(theta);
  r -= f;
  r.at(0, 0) = complex{};
  SpectralField f0 = f;
  f0.at(0, 0) = complex{};
  return relative(lp::besov_norm(r, data_index), lp::besov_norm(f0, data_index));
}

double fixed_point_residual(const SpectralField& theta, const SpectralField& f,
                            const SolveConfig& config) {
  SpectralField r = bl::bee_diag_fast(theta);
  r *= -sign_value(config.sign);
  r += theta;
  r -= sp::inverse_laplacian(f);
  return relative(lp::besov_norm(r, config.index), lp::besov_norm(theta, config.index));
}

SolveResult picard_solve(const SpectralField& f, const SolveConfig& config,
                         const std::optional<SpectralField>& initial) {
  config.validate();
  if (f.rank() != Rank::scalar || !f.real_valued()) {
    throw PreconditionError("picard_solve: real scalar forcing required");
  }
  if (initial) require_same_lattice(f.lattice(), initial->lattice(), "picard_solve");
  const double s = sign_value(config.sign);
  const SpectralField lf = sp::inverse_laplacian(f);
  const auto data = config.data_index();
  auto step = [&](const SpectralField& theta) {
    SpectralField next = bl::bee_diag_fast(theta);
    next *= s;
    next += lf;
    return next;
  };
  auto pde = [&](const SpectralField& theta) { return pde_residual(theta, f, data); };
  SolveResult result = iterate(initial ? *initial : SpectralField(f.lattice()), config, step, pde);
  result.trace.data_norm = lp::besov_norm(f, data);
  if (result.trace.verdict != Verdict::diverged) {
    result.trace.fixed_point_residual = fixed_point_residual(result.theta, f, config);
    result.trace.pde_residual = pde(result.theta);
  } else {
    result.trace.fixed_point_residual = nan;
    result.trace.pde_residual = nan;
  }
  return result;
}

SolveResult perturbation_solve(const SpectralField& theta1, const SpectralField& theta2,
                               const SolveConfig& config) {
  config.validate();
  require_same_lattice(theta1.lattice(), theta2.lattice(), "perturbation_solve");
  const double s = sign_value(config.sign);
  const SpectralField base = theta1 + theta2;
  SpectralField source = bl::bee_diag_fast(theta1);
  source += 2.0 * bl::bee_block(theta1, theta2);
  source += bl::bee_diag_fast(theta2);
  source *= s;
  source -= theta2;

  const SpectralField f = minus_laplacian(theta1);
  const auto data = config.data_index();
  const bl::ShiftedBee shifted(base);
  auto step = [&](const SpectralField& c) {
    SpectralField next = shifted(c);
    next *= s;
    next += source;
    return next;
  };
  auto pde = [&](const SpectralField& c) { return pde_residual(base + c, f, data); };
  SolveResult result = iterate(SpectralField(theta1.lattice()), config, step, pde);
  result.trace.data_norm = lp::besov_norm(f, data);
  if (result.trace.verdict != Verdict::diverged) {
    const SpectralField full = base + result.theta;
    result.trace.fixed_point_residual = fixed_point_residual(full, f, config);
    result.trace.pde_residual = pde(result.theta);
  } else {
    result.trace.fixed_point_residual = nan;
    result.trace.pde_residual = nan;
  }
  return result;
}

void write_trace_csv(std::ostream& out, const IterationTrace& trace) {
  out << "iteration,norm,residual,ratio,pde_residual\n";
  for (const auto& r : trace.records) {
    out << r.iteration << ',' << fmt(r.norm) << ',' << fmt(r.residual) << ',' << fmt(r.ratio)
        << ',' << fmt(r.pde_residual) << '\n';
  }
}

std::string ConstantsReport::to_json() const {
  nlohmann::ordered_json j;
  j["C0"] = c0;
  j["C1"] = c1;
  j["delta0"] = delta0;
  j["epsilon0"] = epsilon0;
  j["samples"] = samples;
  j["seed"] = seed;
  j["lattice"] = {{"M", lattice_size}, {"h", lattice_spacing}};
  j["index"] = {{"p", p}, {"q", q}};
  j["shells"] = {shell_low, shell_high};
  return j.dump(2);
}

std::pair<int, int> sampling_shells(const FrequencyLattice& lattice) {
  const int lo = static_cast<int>(std::floor(std::log2(lattice.spacing()))) + 1;
  const int hi = static_cast<int>(std::floor(std::log2(lattice.nyquist() / 2.0))) - 1;
  if (hi < lo) throw PreconditionError("lattice too small to sample interior shells");
  return {lo, hi};
}

ConstantsReport estimate_constants(const FrequencyLattice& lattice, int samples,
                                   const ConstantsOptions& options) {
  if (samples < 50) throw PreconditionError("estimate_constants needs at least 50 samples");
  auto [lo, hi] = sampling_shells(lattice);
  if (options.shell_low) lo = *options.shell_low;
  if (options.shell_high) hi = *options.shell_high;
  if (hi < lo) throw PreconditionError("estimate_constants: empty shell range");

  const auto sol = lp::BesovIndex::solution(options.p, options.q);
  const auto dat = lp::BesovIndex::data(options.p, options.q);
  const auto part = lp::build_partition(lattice);
  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<int> shell(lo, hi);
  std::uniform_int_distribution<int> offset(-3, 3);
  std::uniform_int_distribution<int> kind(0, 3);

  auto shell_field = [&](int j) {
    return random_field(lattice, std::ldexp(1.0, j - 1), std::ldexp(1.0, j + 1), rng);
  };

  ConstantsReport rep;
  for (int i = 0; i < samples; ++i) {
    const auto f = shell_field(shell(rng));
    const double ratio = lp::besov_norm(sp::inverse_laplacian(f), part, sol) /
                         lp::besov_norm(f, part, dat);
    rep.c0 = std::max(rep.c0, ratio);
  }
  for (int i = 0; i < samples; ++i) {
    SpectralField f(lattice), g(lattice);
    if (kind(rng) == 0) {
      const double r0 = std::ldexp(1.0, lo - 1), r1 = std::ldexp(1.0, hi + 1);
      f = random_field(lattice, r0, r1, rng);
      g = random_field(lattice, r0, r1, rng);
    } else {
      const int j1 = shell(rng);
      const int j2 = std::clamp(j1 + offset(rng), lo, hi);
      f = shell_field(j1);
      g = shell_field(j2);
    }
    const double nf = lp::besov_norm(f, part, sol);
    const double ng = lp::besov_norm(g, part, sol);
    const double ratio = lp::besov_norm(bl::bee_block(f, g), part, sol) / (nf * ng);
    rep.c1 = std::max(rep.c1, ratio);
  }
  rep.delta0 = 1.0 / (8.0 * rep.c0 * rep.c1);
  rep.epsilon0 = 1.0 / (4.0 * rep.c1);
  rep.samples = samples;
  rep.seed = options.seed;
  rep.lattice_size = lattice.size();
  rep.lattice_spacing = lattice.spacing();
  rep.p = options.p;
  rep.q = options.q;
  rep.shell_low = lo;
  rep.shell_high = hi;
  return rep;
}

}  // namespace sqg::solver
