#include "sqg/spectral/operators.hpp"

#include <cmath>
#include <string>

#include "sqg/error.hpp"
#include "sqg/spectral/transform.hpp"

namespace sqg::spectral {

namespace {

void require_scalar(const SpectralField& f, const char* where) {
  if (f.rank() != Rank::scalar) throw PreconditionError(std::string(where) + ": scalar field required");
}

void check_finite(const complex& v, double xi1, double xi2) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
    throw NonFiniteAmplitude("multiplier produced a non-finite amplitude at xi = (" +
                             std::to_string(xi1) + ", " + std::to_string(xi2) +
                             "); the exponent is too negative for the smallest active |xi|");
  }
}

int scaled_wavenumber(int k, int m) { return m >= 0 ? k * (1 << m) : k / (1 << -m); }

// Places component c of f into an n x n complex grid in FFT order.
ComplexGrid pad_complex(const SpectralField& f, int c, int n) {
  ComplexGrid grid(n);
  std::fill(grid.values().begin(), grid.values().end(), complex{});
  const int kmax = f.lattice().max_wavenumber();
  for (int k1 = -kmax; k1 <= kmax; ++k1) {
    const std::size_t row = static_cast<std::size_t>(k1 >= 0 ? k1 : k1 + n) * n;
    for (int k2 = -kmax; k2 <= kmax; ++k2) {
      grid.data()[row + (k2 >= 0 ? k2 : k2 + n)] = f.at(c, k1, k2);
    }
  }
  return grid;
}

}  // namespace

SpectralField apply_symbol(const SpectralField& f, const MultiplierSpec& m) {
  const auto& lat = f.lattice();
  const int kmax = lat.max_wavenumber();
  const double h = lat.spacing();
  if (m.vector_valued()) {
    require_scalar(f, "apply_symbol with a vector-valued multiplier");
    SpectralField out(lat, Rank::vector, f.real_valued());
    for (int k1 = -kmax; k1 <= kmax; ++k1) {
      for (int k2 = -kmax; k2 <= kmax; ++k2) {
        const complex v = f.at(k1, k2);
        if (v == complex{} || (k1 == 0 && k2 == 0)) continue;
        const auto sym = m.evaluate(h * k1, h * k2);
        for (int c = 0; c < 2; ++c) {
          const complex r = sym[static_cast<std::size_t>(c)] * v;
          check_finite(r, h * k1, h * k2);
          out.at(c, k1, k2) = r;
        }
      }
    }
    return out;
  }
  SpectralField out(lat, f.rank(), f.real_valued());
  for (int k1 = -kmax; k1 <= kmax; ++k1) {
    for (int k2 = -kmax; k2 <= kmax; ++k2) {
      if (k1 == 0 && k2 == 0) continue;
      bool evaluated = false;
      complex sym;
      for (int c = 0; c < f.components(); ++c) {
        const complex v = f.at(c, k1, k2);
        if (v == complex{}) continue;
        if (!evaluated) {
          sym = m.evaluate(h * k1, h * k2)[0];
          evaluated = true;
        }
        const complex r = sym * v;
        check_finite(r, h * k1, h * k2);
        out.at(c, k1, k2) = r;
      }
    }
  }
  return out;
}

SpectralField inverse_laplacian(const SpectralField& f) {
  require_scalar(f, "inverse_laplacian");
  return apply_symbol(f, MultiplierSpec::power(-2.0));
}

SpectralField riesz_velocity(const SpectralField& theta) {
  require_scalar(theta, "riesz_velocity");
  return apply_symbol(theta, MultiplierSpec::perp_gradient() * MultiplierSpec::power(-1.0));
}

SpectralField gradient(const SpectralField& f) {
  require_scalar(f, "gradient");
  const auto& lat = f.lattice();
  SpectralField out(lat, Rank::vector, f.real_valued());
  const int kmax = lat.max_wavenumber();
  const double h = lat.spacing();
  for (int k1 = -kmax; k1 <= kmax; ++k1) {
    for (int k2 = -kmax; k2 <= kmax; ++k2) {
      const complex v = f.at(k1, k2);
      out.at(0, k1, k2) = complex{0.0, h * k1} * v;
      out.at(1, k1, k2) = complex{0.0, h * k2} * v;
    }
  }
  return out;
}

SpectralField divergence(const SpectralField& v) {
  if (v.rank() != Rank::vector) throw PreconditionError("divergence: vector field required");
  const auto& lat = v.lattice();
  SpectralField out(lat, Rank::scalar, v.real_valued());
  const int kmax = lat.max_wavenumber();
  const double h = lat.spacing();
  for (int k1 = -kmax; k1 <= kmax; ++k1) {
    for (int k2 = -kmax; k2 <= kmax; ++k2) {
      out.at(k1, k2) = complex{0.0, h * k1} * v.at(0, k1, k2) +
                       complex{0.0, h * k2} * v.at(1, k1, k2);
    }
  }
  return out;
}

SpectralField double_divergence(const SpectralField& t) {
  if (t.rank() != Rank::tensor) throw PreconditionError("double_divergence: tensor field required");
  const auto& lat = t.lattice();
  SpectralField out(lat, Rank::scalar, t.real_valued());
  const int kmax = lat.max_wavenumber();
  const double h = lat.spacing();
  for (int k1 = -kmax; k1 <= kmax; ++k1) {
    for (int k2 = -kmax; k2 <= kmax; ++k2) {
      const double xi[2] = {h * k1, h * k2};
      complex acc{};
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) acc -= xi[a] * xi[b] * t.at(2 * a + b, k1, k2);
      }
      out.at(k1, k2) = acc;
    }
  }
  return out;
}

SpectralField dyadic_rescale(const SpectralField& f, int m, RescaleVariant variant,
                             RescalePlacement placement) {
  if (m < -30 || m > 30) throw PreconditionError("dyadic_rescale: exponent out of range");
  const double lambda = std::ldexp(1.0, m);
  const double amplitude = variant == RescaleVariant::solution ? lambda : lambda * lambda * lambda;
  const auto& lat = f.lattice();

  if (placement == RescalePlacement::dilate_lattice) {
    SpectralField out(FrequencyLattice(lat.size(), lat.spacing() * lambda), f.rank(),
                      f.real_valued());
    for (int c = 0; c < f.components(); ++c) {
      const auto src = f.component(c);
      auto dst = out.component(c);
      for (std::size_t i = 0; i < src.size(); ++i) dst[i] = amplitude * src[i];
    }
    return out;
  }

  SpectralField out(lat, f.rank(), f.real_valued());
  const int kmax = lat.max_wavenumber();
  const int divisor = m < 0 ? (1 << -m) : 1;
  for (int c = 0; c < f.components(); ++c) {
    for (int k1 = -kmax; k1 <= kmax; ++k1) {
      for (int k2 = -kmax; k2 <= kmax; ++k2) {
        const complex v = f.at(c, k1, k2);
        if (v == complex{}) continue;
        if (k1 % divisor != 0 || k2 % divisor != 0) {
          throw SpectrumOverflow("dyadic_rescale: coefficient at k = (" + std::to_string(k1) +
                                 ", " + std::to_string(k2) + ") is not on the 2^" +
                                 std::to_string(-m) + " sublattice");
        }
        const long n1 = m >= 0 ? static_cast<long>(k1) << m : scaled_wavenumber(k1, m);
        const long n2 = m >= 0 ? static_cast<long>(k2) << m : scaled_wavenumber(k2, m);
        if (std::labs(n1) > kmax || std::labs(n2) > kmax) {
          throw SpectrumOverflow("dyadic_rescale: relocated frequency exceeds the Nyquist limit");
        }
        out.at(c, static_cast<int>(n1), static_cast<int>(n2)) = amplitude * v;
      }
    }
  }
  return out;
}

SpectralField multiply(const SpectralField& f, const SpectralField& g) {
  require_same_lattice(f.lattice(), g.lattice(), "multiply");
  require_scalar(f, "multiply");
  require_scalar(g, "multiply");
  const auto& lat = f.lattice();
  const int p = 2 * lat.size();
  const double scale = 1.0 / (static_cast<double>(p) * p);

  if (f.real_valued() && g.real_valued()) {
    RealGrid a = synthesize(f, 0, p);
    {
      const RealGrid b = synthesize(g, 0, p);
      double* pa = a.data();
      const double* pb = b.data();
      for (std::size_t i = 0; i < a.size(); ++i) pa[i] *= pb[i];
    }
    SpectralField out(lat);
    analyze(std::move(a), out, 0);
    out.clear_nyquist();
    return out;
  }

  ComplexGrid a = pad_complex(f, 0, p);
  inverse_complex(a);
  {
    ComplexGrid b = pad_complex(g, 0, p);
    inverse_complex(b);
    for (std::size_t i = 0; i < a.size(); ++i) a.data()[i] *= b.data()[i];
  }
  forward_complex(a);
  SpectralField out(lat, Rank::scalar, false);
  const int kmax = lat.max_wavenumber();
  for (int k1 = -kmax; k1 <= kmax; ++k1) {
    const std::size_t row = static_cast<std::size_t>(k1 >= 0 ? k1 : k1 + p) * p;
    for (int k2 = -kmax; k2 <= kmax; ++k2) {
      out.at(k1, k2) = scale * a.data()[row + (k2 >= 0 ? k2 : k2 + p)];
    }
  }
  return out;
}

}  // namespace sqg::spectral
