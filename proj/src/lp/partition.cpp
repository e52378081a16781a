#include "sqg/lp/partition.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "sqg/error.hpp"

namespace sqg::lp {

namespace {

double bump(double t) noexcept { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

}  // namespace

double smooth_step(double t) noexcept {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = bump(t);
  return a / (a + bump(1.0 - t));
}

double radial_cut(double r, const CutProfile& profile) noexcept {
  return smooth_step((profile.outer - r) / (profile.outer - profile.inner));
}

void validate_profile(const CutProfile& profile) {
  if (!(profile.inner >= 1.25 && profile.inner < profile.outer && profile.outer <= 1.75)) {
    throw PreconditionError("partition profile needs 5/4 <= inner < outer <= 7/4, got (" +
                            std::to_string(profile.inner) + ", " +
                            std::to_string(profile.outer) + ")");
  }
}

DyadicPartition::DyadicPartition(const FrequencyLattice& lattice, CutProfile profile, int j_min,
                                 int j_max)
    : lattice_(lattice), profile_(profile), j_min_(j_min), j_max_(j_max) {
  validate_profile(profile_);
  if (j_max_ < j_min_) {
    throw PreconditionError("lattice too coarse to register any shell (j_max < j_min)");
  }
}

double DyadicPartition::phi(int j, double r) const noexcept {
  return radial_cut(std::ldexp(r, -j), profile_) - radial_cut(std::ldexp(r, 1 - j), profile_);
}

double DyadicPartition::window_sum(double r) const noexcept {
  return radial_cut(std::ldexp(r, -j_max_), profile_) -
         radial_cut(std::ldexp(r, 1 - j_min_), profile_);
}

double DyadicPartition::support_inner(int j) const noexcept {
  return std::ldexp(profile_.inner, j - 1);
}

double DyadicPartition::support_outer(int j) const noexcept {
  return std::ldexp(profile_.outer, j);
}

DyadicPartition build_partition(const FrequencyLattice& lattice, CutProfile profile) {
  const int j_min = static_cast<int>(std::floor(std::log2(lattice.spacing())));
  const int j_max =
      static_cast<int>(std::ceil(std::log2(std::sqrt(2.0) * lattice.nyquist())));
  return DyadicPartition(lattice, profile, j_min, j_max);
}

DyadicPartition build_partition(const FrequencyLattice& lattice, int j_min, int j_max,
                                CutProfile profile) {
  return DyadicPartition(lattice, profile, j_min, j_max);
}

SpectralField shell_project(const SpectralField& f, const DyadicPartition& partition, int j) {
  require_same_lattice(f.lattice(), partition.lattice(), "shell_project");
  const auto& lat = f.lattice();
  SpectralField out(lat, f.rank(), f.real_valued());
  const int kmax = lat.max_wavenumber();
  const double outer = partition.support_outer(j);
  const double inner = partition.support_inner(j);
  const int kr = std::min(kmax, static_cast<int>(std::ceil(outer / lat.spacing())));
  for (int k1 = -kr; k1 <= kr; ++k1) {
    for (int k2 = -kr; k2 <= kr; ++k2) {
      const double r = lat.modulus(k1, k2);
      if (r <= inner || r >= outer) continue;
      const double w = partition.phi(j, r);
      if (w == 0.0) continue;
      for (int c = 0; c < f.components(); ++c) out.at(c, k1, k2) = w * f.at(c, k1, k2);
    }
  }
  return out;
}

bool shell_active(const SpectralField& f, const DyadicPartition& partition, int j) {
  const auto& lat = f.lattice();
  const int kmax = lat.max_wavenumber();
  const double outer = partition.support_outer(j);
  const double inner = partition.support_inner(j);
  const int kr = std::min(kmax, static_cast<int>(std::ceil(outer / lat.spacing())));
  for (int k1 = -kr; k1 <= kr; ++k1) {
    for (int k2 = -kr; k2 <= kr; ++k2) {
      const double r = lat.modulus(k1, k2);
      if (r <= inner || r >= outer) continue;
      for (int c = 0; c < f.components(); ++c) {
        if (f.at(c, k1, k2) != complex{}) return true;
      }
    }
  }
  return false;
}

void write_partition_dump(std::ostream& out, const DyadicPartition& partition,
                          const std::vector<int>& shells, int samples) {
  if (samples < 2) throw PreconditionError("partition dump needs at least two samples");
  const double r_max = std::sqrt(2.0) * partition.lattice().nyquist();
  out << "r";
  for (int j : shells) out << ",phi_" << j;
  out << ",window_sum\n";
  char buf[32];
  for (int i = 0; i < samples; ++i) {
    const double r = r_max * i / (samples - 1);
    std::snprintf(buf, sizeof buf, "%.17g", r);
    out << buf;
    for (int j : shells) {
      std::snprintf(buf, sizeof buf, "%.17g", partition.phi(j, r));
      out << ',' << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", partition.window_sum(r));
    out << ',' << buf << '\n';
  }
}

}  // namespace sqg::lp
