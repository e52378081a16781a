#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "sqg/field.hpp"
#include "sqg/random.hpp"

namespace oracle {

using sqg::complex;
using sqg::FrequencyLattice;
using sqg::SpectralField;

// a cos(h k . x) as coefficients.
inline void add_cos(SpectralField& f, int k1, int k2, double a, int c = 0) {
  f.at(c, k1, k2) += a / 2.0;
  f.at(c, -k1, -k2) += a / 2.0;
}

// a sin(h k . x) as coefficients.
inline void add_sin(SpectralField& f, int k1, int k2, double a, int c = 0) {
  f.at(c, k1, k2) += complex{0.0, -a / 2.0};
  f.at(c, -k1, -k2) += complex{0.0, a / 2.0};
}

inline SpectralField random_full(const FrequencyLattice& lat, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sqg::random_field(lat, 0.0, lat.nyquist() * 2.0, rng);
}

// Box-restricted convolution sum_eta f(xi - eta) g(eta), O(M^4).
inline SpectralField brute_convolution(const SpectralField& f, const SpectralField& g) {
  const auto& lat = f.lattice();
  const int kmax = lat.max_wavenumber();
  SpectralField out(lat, sqg::Rank::scalar, f.real_valued() && g.real_valued());
  for (int x1 = -kmax; x1 <= kmax; ++x1)
    for (int x2 = -kmax; x2 <= kmax; ++x2) {
      complex acc{};
      for (int e1 = -kmax; e1 <= kmax; ++e1)
        for (int e2 = -kmax; e2 <= kmax; ++e2) {
          const int d1 = x1 - e1, d2 = x2 - e2;
          if (!lat.holds(d1, d2)) continue;
          acc += f.at(d1, d2) * g.at(e1, e2);
        }
      out.at(x1, x2) = acc;
    }
  return out;
}

// Physical value at grid point (m1, m2) by direct summation.
inline complex direct_value(const SpectralField& f, int m1, int m2, int c = 0) {
  const auto& lat = f.lattice();
  const int kmax = lat.max_wavenumber();
  const double step = lat.grid_step();
  const double h = lat.spacing();
  complex acc{};
  for (int k1 = -kmax; k1 <= kmax; ++k1)
    for (int k2 = -kmax; k2 <= kmax; ++k2) {
      const double phase = h * (k1 * m1 * step + k2 * m2 * step);
      acc += f.at(c, k1, k2) * std::polar(1.0, phase);
    }
  return acc;
}

inline double max_diff(const SpectralField& a, const SpectralField& b) {
  double m = 0.0;
  for (int c = 0; c < a.components(); ++c) {
    const auto x = a.component(c);
    const auto y = b.component(c);
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  }
  return m;
}

}  // namespace oracle
