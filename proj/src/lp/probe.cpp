#include "sqg/lp/probe.hpp"

#include <cmath>
#include <string>

#include "sqg/error.hpp"

namespace sqg::lp {

std::array<double, 2> ProbeFunction::center() const noexcept {
  const double scale = std::ldexp(1.0, j);
  return {scale * a[0], scale * a[1]};
}

double ProbeFunction::radius() const noexcept { return std::ldexp(1.0, j - gap); }

double ProbeFunction::closed_form(double xi1, double xi2) const noexcept {
  const auto c = center();
  const double r = std::hypot(xi1 - c[0], xi2 - c[1]);
  return radial_cut(std::ldexp(r, gap + 1 - j), profile);
}

double ProbeFunction::definitional(double xi1, double xi2) const noexcept {
  const auto c = center();
  const double r = std::hypot(xi1 - c[0], xi2 - c[1]);
  if (r == 0.0) return 1.0;
  // phi_k(r) vanishes once 2^{k-1} * inner >= r.
  const int k_top = static_cast<int>(std::ceil(std::log2(r))) + 2;
  double sum = 0.0;
  for (int k = j - gap; k <= k_top; ++k) {
    sum += radial_cut(std::ldexp(r, -k), profile) - radial_cut(std::ldexp(r, 1 - k), profile);
  }
  return 1.0 - sum;
}

ProbeFunction build_probe(const FrequencyLattice& lattice, int j, int gap,
                          std::array<double, 2> a, CutProfile profile) {
  validate_profile(profile);
  if (gap < 3) {
    throw PreconditionError("probe gap must be >= 3 so that the probe sits on the shell plateau");
  }
  if (std::abs(std::hypot(a[0], a[1]) - 1.0) > 1e-12) {
    throw PreconditionError("probe direction must be a unit vector");
  }
  ProbeFunction probe{j, gap, a, profile};
  const auto c = probe.center();
  const double rho = probe.radius();
  const double h = lattice.spacing();
  const double limit = h * lattice.max_wavenumber();
  if (std::abs(c[0]) + rho > limit || std::abs(c[1]) + rho > limit) {
    throw SpectrumOverflow("probe " + std::to_string(j) + " reaches beyond the Nyquist frequency");
  }
  const int lo1 = static_cast<int>(std::floor((c[0] - rho) / h));
  const int hi1 = static_cast<int>(std::ceil((c[0] + rho) / h));
  const int lo2 = static_cast<int>(std::floor((c[1] - rho) / h));
  const int hi2 = static_cast<int>(std::ceil((c[1] + rho) / h));
  for (int k1 = lo1; k1 <= hi1; ++k1) {
    for (int k2 = lo2; k2 <= hi2; ++k2) {
      if (probe.closed_form(h * k1, h * k2) > 0.0) return probe;
    }
  }
  throw EmptySupport("probe " + std::to_string(j) + " with gap " + std::to_string(gap) +
                     " contains no lattice point; use a smaller gap or a finer spacing");
}

int lowest_probe_shell(const FrequencyLattice& lattice, int gap) {
  return static_cast<int>(std::ceil(std::log2(lattice.spacing()))) + gap;
}

SpectralField probe_project(const SpectralField& f, const ProbeFunction& probe) {
  if (f.rank() != Rank::scalar) throw PreconditionError("probe_project: scalar field required");
  const auto& lat = f.lattice();
  SpectralField out(lat, Rank::scalar, false);
  const double h = lat.spacing();
  const auto c = probe.center();
  const double rho = probe.radius();
  const int kmax = lat.max_wavenumber();
  const int lo1 = std::max(-kmax, static_cast<int>(std::floor((c[0] - rho) / h)));
  const int hi1 = std::min(kmax, static_cast<int>(std::ceil((c[0] + rho) / h)));
  const int lo2 = std::max(-kmax, static_cast<int>(std::floor((c[1] - rho) / h)));
  const int hi2 = std::min(kmax, static_cast<int>(std::ceil((c[1] + rho) / h)));
  for (int k1 = lo1; k1 <= hi1; ++k1) {
    for (int k2 = lo2; k2 <= hi2; ++k2) {
      const double w = probe.closed_form(h * k1, h * k2);
      if (w != 0.0) out.at(k1, k2) = w * f.at(k1, k2);
    }
  }
  return out;
}

}  // namespace sqg::lp
