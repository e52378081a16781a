#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

#include <json.hpp>

#include "sqg/bilinear/bilinear.hpp"
#include "sqg/error.hpp"
#include "sqg/illposed/illposed.hpp"
#include "sqg/lp/probe.hpp"
#include "sqg/spectral/operators.hpp"

namespace sqg::illposed {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Entry {
  int k1;
  int k2;
  complex v;
};

std::vector<Entry> support(const SpectralField& f) {
  std::vector<Entry> out;
  const int kmax = f.lattice().max_wavenumber();
  for (int k1 = -kmax; k1 <= kmax; ++k1) {
    for (int k2 = -kmax; k2 <= kmax; ++k2) {
      const complex v = f.at(k1, k2);
      if (v != complex{} && (k1 != 0 || k2 != 0)) out.push_back({k1, k2, v});
    }
  }
  return out;
}

SplitTerms split_at(const SpectralField& theta, const std::vector<Entry>& entries, int k1, int k2) {
  const auto& lat = theta.lattice();
  if (!lat.holds(k1, k2)) throw PreconditionError("iterate2_split: probe outside the lattice");
  if (k1 == 0 && k2 == 0) throw PreconditionError("iterate2_split: probe at the origin");
  const double h = lat.spacing();
  const double x1 = h * k1, x2 = h * k2;
  const double xx = x1 * x1 + x2 * x2;
  SplitTerms out;
  out.k1 = k1;
  out.k2 = k2;
  for (const auto& e : entries) {
    const int twice = 2 * e.k1;
    const double weight = twice > k1 ? 2.0 : (twice == k1 ? 1.0 : 0.0);
    if (weight == 0.0) continue;
    const int d1 = k1 - e.k1, d2 = k2 - e.k2;
    if (!lat.holds(d1, d2) || (d1 == 0 && d2 == 0)) continue;
    const complex fv = theta.at(d1, d2);
    if (fv == complex{}) continue;
    const double e1 = h * e.k1, e2 = h * e.k2;
    const double re = lat.modulus(e.k1, e.k2);
    const double rd = lat.modulus(d1, d2);
    const complex base = weight * 0.5 / ((re + rd) * rd * re) * fv * e.v;
    out.main += (2.0 * x1 * x2 * e1 * e1 / xx) * base;
    out.cross += (2.0 * ((x2 * x2 - x1 * x1) * e1 * e2 - x1 * x2 * e2 * e2) / xx) * base;
    out.perp += (-(x2 * e1 - x1 * e2)) * base;
  }
  return out;
}

}  // namespace

Iterates second_iterate(const SpectralField& f, solver::NonlinearSign sign) {
  Iterates it{spectral::inverse_laplacian(f), SpectralField(f.lattice())};
  it.theta2 = bilinear::bee_diag_fast(it.theta1);
  it.theta2 *= solver::sign_value(sign);
  return it;
}

SplitTerms iterate2_split(const SpectralField& theta1, int k1, int k2) {
  return split_at(theta1, support(theta1), k1, k2);
}

std::vector<SplitTerms> iterate2_split(const SpectralField& theta1,
                                       std::span<const std::array<int, 2>> probes) {
  if (theta1.rank() != Rank::scalar || !theta1.real_valued()) {
    throw PreconditionError("iterate2_split: real scalar field required");
  }
  const auto entries = support(theta1);
  std::vector<SplitTerms> out;
  out.reserve(probes.size());
  for (const auto& p : probes) out.push_back(split_at(theta1, entries, p[0], p[1]));
  return out;
}

std::vector<SplitTerms> iterate2_split(const FrequencyLattice& lat, const ForceSpec& spec,
                                       std::span<const std::array<int, 2>> probes) {
  const double limit = spec.variant == Step::step3 ? std::exp2(spec.carrier_exponent() - 1) : 1.0;
  for (const auto& p : probes) {
    const double r = lat.modulus(p[0], p[1]);
    const bool ok = spec.variant == Step::step3 ? r < limit : r <= limit;
    if (!ok) {
      throw PreconditionError("iterate2_split: probe (" + std::to_string(p[0]) + "," +
                              std::to_string(p[1]) + ") outside the low-frequency region");
    }
  }
  return iterate2_split(spectral::inverse_laplacian(build_forcing(lat, spec)), probes);
}

std::vector<std::array<int, 2>> quadrant_probes(const FrequencyLattice& lat, double radius,
                                                bool first_quadrant_only) {
  std::vector<std::array<int, 2>> out;
  const int reach = std::min(lat.max_wavenumber(), static_cast<int>(radius / lat.spacing()));
  for (int k1 = -reach; k1 <= reach; ++k1) {
    for (int k2 = -reach; k2 <= reach; ++k2) {
      if (k1 == 0 || k2 == 0) continue;
      if (first_quadrant_only && (k1 < 0 || k2 < 0)) continue;
      if (lat.modulus(k1, k2) <= radius) out.push_back({k1, k2});
    }
  }
  return out;
}

std::vector<lp::ShellEntry> lowfreq_profile(const SpectralField& theta,
                                            const lp::DyadicPartition& partition, int j_low,
                                            int j_high) {
  if (j_high < j_low) throw PreconditionError("lowfreq_profile: empty shell range");
  if (!partition.covers(j_low) || !partition.covers(j_high)) {
    throw PreconditionError("lowfreq_profile: shell range outside the partition window");
  }
  std::vector<lp::ShellEntry> out;
  for (int j = j_low; j <= j_high; ++j) {
    const auto piece = lp::shell_project(theta, partition, j);
    out.push_back({j, std::exp2(-j) * lp::lp_norm(piece, lp::infinity)});
  }
  return out;
}

double lowfreq_lower_bound(const SpectralField& theta, const lp::DyadicPartition& partition,
                           int j_low, int j_high) {
  if (j_low < partition.j_min() || j_high > -1) {
    throw PreconditionError("lowfreq_lower_bound: shell range must lie in [j_min, -1]");
  }
  double best = 0.0;
  for (const auto& e : lowfreq_profile(theta, partition, j_low, j_high)) best = std::max(best, e.value);
  return best;
}

double lowfreq_lower_bound(const SpectralField& theta, int j_low, int j_high) {
  return lowfreq_lower_bound(theta, lp::build_partition(theta.lattice()), j_low, j_high);
}

double InflationReport::aggregate(double q) const {
  for (const auto& [qq, v] : aggregates) {
    if (qq == q) return v;
  }
  throw PreconditionError("InflationReport: aggregate for q = " + fmt(q) + " not computed");
}

std::string InflationReport::to_json() const {
  nlohmann::ordered_json j;
  if (!spec_json.empty()) j["spec"] = nlohmann::ordered_json::parse(spec_json);
  auto& rows = j["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : entries) rows.push_back({{"n", e.n}, {"shell", e.shell}, {"value", e.value}});
  auto& agg = j["aggregates"] = nlohmann::ordered_json::array();
  for (const auto& [q, v] : aggregates) {
    agg.push_back({{"q", std::isinf(q) ? nlohmann::ordered_json("inf") : nlohmann::ordered_json(q)},
                   {"value", v}});
  }
  j["data_norm"] = data_norm;
  j["lowfreq_bound"] = std::isfinite(lowfreq_bound) ? nlohmann::ordered_json(lowfreq_bound)
                                                    : nlohmann::ordered_json(nullptr);
  return j.dump(2);
}

void InflationReport::write_csv(std::ostream& out) const {
  out << "n,shell,value\n";
  for (const auto& e : entries) out << e.n << ',' << e.shell << ',' << fmt(e.value) << '\n';
}

InflationReport inflation_profile(const SpectralField& theta,
                                  std::span<const InflationShell> shells,
                                  std::span<const double> qs, int gap) {
  InflationReport report;
  std::vector<double> values;
  for (const auto& sh : shells) {
    const auto probe = lp::build_probe(theta.lattice(), sh.shell, gap);
    const auto piece = lp::probe_project(theta, probe);
    const double v = std::exp2(-0.5 * sh.shell) * lp::lp_norm(piece, 4.0);
    report.entries.push_back({sh.n, sh.shell, v});
    values.push_back(v);
  }
  for (double q : qs) report.aggregates.emplace_back(q, lp::aggregate_lq(values, q));
  report.lowfreq_bound = nan;
  return report;
}

InflationReport step3_inflation(const FrequencyLattice& lat, const ForceSpec& spec,
                                std::span<const double> qs, const lp::BesovIndex& data_index) {
  const auto forcing = force_step3(lat, spec);
  const auto it = second_iterate(forcing.forcing);
  std::vector<InflationShell> shells;
  for (int k = spec.block_low; k <= spec.block_high; ++k) shells.push_back({k, spec.exponent(k)});
  auto report = inflation_profile(it.theta2, shells, qs, spec.probe_gap);
  report.data_norm = lp::besov_norm(forcing.forcing, data_index);
  const auto part = lp::build_partition(lat);
  if (part.j_min() <= -1) report.lowfreq_bound = lowfreq_lower_bound(it.theta2, part, part.j_min(), -1);
  ForceSpec echo = spec;
  echo.stride = forcing.stride;
  report.spec_json = echo.to_json();
  return report;
}

double step1_bilinear_ratio(const FrequencyLattice& lat, int N, double delta,
                            const lp::BesovIndex& index) {
  const auto theta1 = spectral::inverse_laplacian(force_step1(lat, N, delta));
  lp::NormOptions exact;
  exact.oversample = lp::exact_oversample(theta1, index.p);
  const double n1 = lp::besov_norm(theta1, index, exact);
  const auto b = bilinear::bee_block(theta1, theta1);
  return lp::besov_norm(b, index, exact) / (n1 * n1);
}

Step1Row step1_run(const FrequencyLattice& lat, int N, const Step1Options& options) {
  options.solve.validate();
  Step1Row row;
  row.N = N;
  const auto f = force_step1(lat, N, options.delta);
  lp::NormOptions exact;
  exact.oversample = lp::exact_oversample(f, options.p);
  row.data_norm = lp::besov_norm(f, lp::BesovIndex::data(options.p, options.q), exact);
  const auto it = second_iterate(f, options.solve.sign);
  row.theta1_norm = lp::besov_norm(it.theta1, lp::BesovIndex::solution(options.p, options.q));
  row.theta2_norm = lp::besov_norm(it.theta2, options.solve.index);
  const auto part = lp::build_partition(lat);
  row.lowfreq_bound =
      lowfreq_lower_bound(it.theta2, part, options.j_low.value_or(part.j_min()), options.j_high);
  row.lowfreq_constant = row.lowfreq_bound / (options.delta * options.delta);
  if (options.solve_perturbation) {
    const auto res = solver::perturbation_solve(it.theta1, it.theta2, options.solve);
    row.perturbation_norm = lp::besov_norm(res.theta, options.solve.index);
    row.perturbation_ratio = row.perturbation_norm / row.theta2_norm;
    row.verdict = res.trace.verdict;
    row.iterations = static_cast<int>(res.trace.records.size());
    row.pde_residual = res.trace.pde_residual;
  } else {
    row.perturbation_norm = nan;
    row.perturbation_ratio = nan;
    row.pde_residual = nan;
  }
  return row;
}

std::vector<Step1Row> step1_sweep(const FrequencyLattice& lat, std::span<const int> Ns,
                                  const Step1Options& options) {
  for (int N : Ns) {
    ForceSpec spec;
    spec.N = N;
    spec.delta = options.delta;
    spec.validate(lat);
  }
  std::vector<Step1Row> rows;
  for (int N : Ns) rows.push_back(step1_run(lat, N, options));
  return rows;
}

void write_step1_csv(std::ostream& out, std::span<const Step1Row> rows) {
  out << "N,data_norm,theta1_norm,theta2_norm,lowfreq_bound,lowfreq_constant,"
         "perturbation_norm,perturbation_ratio,verdict,iterations,pde_residual\n";
  for (const auto& r : rows) {
    out << r.N << ',' << fmt(r.data_norm) << ',' << fmt(r.theta1_norm) << ','
        << fmt(r.theta2_norm) << ',' << fmt(r.lowfreq_bound) << ',' << fmt(r.lowfreq_constant)
        << ',' << fmt(r.perturbation_norm) << ',' << fmt(r.perturbation_ratio) << ','
        << solver::to_string(r.verdict) << ',' << r.iterations << ',' << fmt(r.pde_residual)
        << '\n';
  }
}

}  // namespace sqg::illposed
