#include "sqg/lp/besov.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "sqg/error.hpp"
#include "sqg/spectral/transform.hpp"

namespace sqg::lp {

namespace {

void require_exponent(double v, const char* name) {
  if (!(v >= 1.0)) throw PreconditionError(std::string("Besov exponent ") + name + " must lie in [1, inf]");
}

bool near(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

double inv(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

template <class Abs>
double lp_accumulate(std::size_t n, Abs&& abs_at, double cell_area, double p) {
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) peak = std::max(peak, abs_at(i));
  if (peak == 0.0 || std::isinf(p)) return peak;
  long double acc = 0.0L;
  if (p == 2.0) {
    for (std::size_t i = 0; i < n; ++i) {
      const long double t = abs_at(i) / peak;
      acc += t * t;
    }
  } else if (p == 4.0) {
    for (std::size_t i = 0; i < n; ++i) {
      const long double t = abs_at(i) / peak;
      const long double t2 = t * t;
      acc += t2 * t2;
    }
  } else if (p == std::round(p) && p <= 64.0) {
    const auto e = static_cast<unsigned>(p);
    for (std::size_t i = 0; i < n; ++i) {
      long double base = abs_at(i) / peak, r = 1.0L;
      for (unsigned k = e; k != 0; k >>= 1) {
        if (k & 1U) r *= base;
        base *= base;
      }
      acc += r;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) acc += std::pow(static_cast<long double>(abs_at(i) / peak), static_cast<long double>(p));
  }
  return peak * static_cast<double>(std::pow(acc * cell_area, 1.0L / p));
}

}  // namespace

BesovIndex::BesovIndex(double s_, double p_, double q_) : s(s_), p(p_), q(q_) {
  if (!std::isfinite(s)) throw PreconditionError("Besov smoothness must be finite");
  require_exponent(p, "p");
  require_exponent(q, "q");
}

BesovIndex BesovIndex::data(double p, double q) { return {2.0 * inv(p) - 3.0, p, q}; }
BesovIndex BesovIndex::solution(double p, double q) { return {2.0 * inv(p) - 1.0, p, q}; }

bool BesovIndex::is_data_critical() const noexcept { return near(s, 2.0 * inv(p) - 3.0); }
bool BesovIndex::is_solution_critical() const noexcept { return near(s, 2.0 * inv(p) - 1.0); }

double lp_norm(std::span<const double> samples, double cell_area, double p) {
  require_exponent(p, "p");
  return lp_accumulate(samples.size(), [&](std::size_t i) { return std::abs(samples[i]); },
                       cell_area, p);
}

double lp_norm(std::span<const complex> samples, double cell_area, double p) {
  require_exponent(p, "p");
  return lp_accumulate(samples.size(), [&](std::size_t i) { return std::abs(samples[i]); },
                       cell_area, p);
}

double lp_norm(const SpectralField& f, double p, int oversample) {
  if (f.rank() != Rank::scalar) throw PreconditionError("lp_norm: scalar field required");
  const auto& lat = f.lattice();
  if (!f.real_valued()) {
    const auto grid = spectral::synthesize_complex(f);
    return lp_norm(grid.values(), lat.cell_area(), p);
  }
  const int n = lat.size() * oversample;
  const auto grid = spectral::synthesize(f, 0, n);
  const double step = lat.box_side() / n;
  return lp_norm(grid.values(), step * step, p);
}

int exact_oversample(const SpectralField& f, double p, int cap) {
  if (!std::isfinite(p) || p != std::round(p) || static_cast<long>(p) % 2 != 0) return 1;
  const auto& lat = f.lattice();
  const int kmax = lat.max_wavenumber();
  int reach = 0;
  for (int c = 0; c < f.components(); ++c) {
    for (int k1 = -kmax; k1 <= kmax; ++k1) {
      for (int k2 = -kmax; k2 <= kmax; ++k2) {
        if (f.at(c, k1, k2) != complex{}) reach = std::max({reach, std::abs(k1), std::abs(k2)});
      }
    }
  }
  int os = 1;
  while (os < cap && static_cast<double>(lat.size()) * os <= p * reach) os *= 2;
  return os;
}

ShellProfile shell_profile(const SpectralField& f, const DyadicPartition& partition, double s,
                           double p, const NormOptions& options) {
  require_same_lattice(f.lattice(), partition.lattice(), "shell_profile");
  if (f.rank() != Rank::scalar) throw PreconditionError("shell_profile: scalar field required");
  require_exponent(p, "p");
  if (options.oversample < 1 || (options.oversample & (options.oversample - 1)) != 0) {
    throw PreconditionError("oversample factor must be a power of two");
  }
  const auto& lat = f.lattice();
  ShellProfile profile;

  // Energy that the window's partition sum does not reproduce.
  const int kmax = lat.max_wavenumber();
  long double total = 0.0L, missing = 0.0L;
  const double peak = f.max_abs();
  if (peak > 0.0) {
    for (int k1 = -kmax; k1 <= kmax; ++k1) {
      for (int k2 = -kmax; k2 <= kmax; ++k2) {
        const double a = std::abs(f.at(k1, k2)) / peak;
        if (a == 0.0) continue;
        const double gap = 1.0 - partition.window_sum(lat.modulus(k1, k2));
        total += static_cast<long double>(a) * a;
        missing += static_cast<long double>(a * gap) * (a * gap);
      }
    }
    profile.out_of_window_fraction = static_cast<double>(missing / total);
  }
  if (profile.out_of_window_fraction > options.warn_threshold) {
    warn("Besov norm: " + std::to_string(profile.out_of_window_fraction) +
         " of the coefficient energy lies outside the shell window [" +
         std::to_string(partition.j_min()) + ", " + std::to_string(partition.j_max()) + "]");
  }

  for (int j = partition.j_min(); j <= partition.j_max(); ++j) {
    if (!shell_active(f, partition, j)) continue;
    const SpectralField shell = shell_project(f, partition, j);
    double norm = 0.0;
    if (f.real_valued()) {
      const int n = lat.size() * options.oversample;
      const auto grid = spectral::synthesize(shell, 0, n);
      const double step = lat.box_side() / n;
      norm = lp_norm(grid.values(), step * step, p);
    } else {
      const auto grid = spectral::synthesize_complex(shell);
      norm = lp_norm(grid.values(), lat.cell_area(), p);
    }
    profile.entries.push_back({j, std::pow(2.0, s * j) * norm});
  }
  return profile;
}

ShellProfile shell_profile(const SpectralField& f, double s, double p,
                           const NormOptions& options) {
  return shell_profile(f, build_partition(f.lattice()), s, p, options);
}

double aggregate_lq(std::span<const double> values, double q) {
  require_exponent(q, "q");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.empty()) return 0.0;
  const double peak = sorted.back();
  if (peak == 0.0 || std::isinf(q)) return peak;
  long double acc = 0.0L;
  for (double v : sorted) acc += std::pow(static_cast<long double>(v / peak), static_cast<long double>(q));
  return peak * static_cast<double>(std::pow(acc, 1.0L / q));
}

double aggregate_lq(const ShellProfile& profile, double q) {
  std::vector<double> values;
  values.reserve(profile.entries.size());
  for (const auto& e : profile.entries) values.push_back(e.value);
  return aggregate_lq(values, q);
}

double besov_norm(const SpectralField& f, const DyadicPartition& partition,
                  const BesovIndex& index, const NormOptions& options) {
  return aggregate_lq(shell_profile(f, partition, index.s, index.p, options), index.q);
}

double besov_norm(const SpectralField& f, const BesovIndex& index, const NormOptions& options) {
  return besov_norm(f, build_partition(f.lattice()), index, options);
}

void write_profile_csv(std::ostream& out, const ShellProfile& profile) {
  out << "j,shell_value\n";
  char buf[32];
  for (const auto& e : profile.entries) {
    std::snprintf(buf, sizeof buf, "%.17g", e.value);
    out << e.j << ',' << buf << '\n';
  }
}

}  // namespace sqg::lp
