#include "sqg/bilinear/bilinear.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "sqg/error.hpp"
#include "sqg/spectral/operators.hpp"
#include "sqg/spectral/transform.hpp"

namespace sqg::bilinear {

namespace sp = sqg::spectral;

namespace {

struct Entry {
  int k1, k2;
  complex v0, v1;
};

std::vector<Entry> nonzero_entries(const SpectralField& f) {
  std::vector<Entry> out;
  const int kmax = f.lattice().max_wavenumber();
  for (int k1 = -kmax; k1 <= kmax; ++k1) {
    for (int k2 = -kmax; k2 <= kmax; ++k2) {
      if (k1 == 0 && k2 == 0) continue;
      const complex a = f.at(0, k1, k2);
      const complex b = f.components() > 1 ? f.at(1, k1, k2) : complex{};
      if (a != complex{} || b != complex{}) out.push_back({k1, k2, a, b});
    }
  }
  return out;
}

void require_scalar_real(const SpectralField& f, const char* where) {
  if (f.rank() != Rank::scalar) throw PreconditionError(std::string(where) + ": scalar field required");
  if (!f.real_valued()) throw PreconditionError(std::string(where) + ": real-valued field required");
}

void require_quadrature_size(const FrequencyLattice& lat, const char* where) {
  if (lat.size() > quadrature_limit) {
    throw ResourceLimit(std::string(where) + ": lattice of " + std::to_string(lat.size()) +
                        " points per axis is too large for the direct quadrature (limit " +
                        std::to_string(quadrature_limit) + ")");
  }
}

// Weight i xi_a / |xi|^2 applied during accumulation.
auto divergence_weight(const FrequencyLattice& lat, int a) {
  const double h = lat.spacing();
  return [h, a](int k1, int k2) -> complex {
    if (k1 == 0 && k2 == 0) return {};
    const double x1 = h * k1, x2 = h * k2;
    return {0.0, (a == 0 ? x1 : x2) / (x1 * x1 + x2 * x2)};
  };
}

// Weight of component a of grad^perp (-Delta)^{-1/2}: i xi^perp_a / |xi|.
auto velocity_weight(const FrequencyLattice& lat, int a) {
  const double h = lat.spacing();
  return [h, a](int k1, int k2) -> complex {
    if (k1 == 0 && k2 == 0) return {};
    const double x1 = h * k1, x2 = h * k2;
    const double r = std::hypot(x1, x2);
    return {0.0, (a == 0 ? -x2 : x1) / r};
  };
}

auto derivative_weight(const FrequencyLattice& lat, int a) {
  const double h = lat.spacing();
  return [h, a](int k1, int k2) -> complex { return {0.0, h * (a == 0 ? k1 : k2)}; };
}

}  // namespace

SpectralField tee(const SpectralField& theta, const SpectralField& v) {
  require_same_lattice(theta.lattice(), v.lattice(), "tee");
  if (theta.rank() != Rank::scalar || v.rank() != Rank::vector) {
    throw PreconditionError("tee: expects a scalar and a vector field");
  }
  const auto& lat = theta.lattice();
  require_quadrature_size(lat, "tee");
  const double h = lat.spacing();
  const int kmax = lat.max_wavenumber();
  const auto th = nonzero_entries(theta);
  const auto ve = nonzero_entries(v);
  SpectralField out(lat, Rank::tensor, false);
  for (const auto& a : th) {
    const double ra = lat.modulus(a.k1, a.k2);
    for (const auto& b : ve) {
      const int x1 = a.k1 + b.k1, x2 = a.k2 + b.k2;
      if (std::abs(x1) > kmax || std::abs(x2) > kmax) continue;
      const double rb = lat.modulus(b.k1, b.k2);
      const double denom = 2.0 * (ra + rb);
      // xi - 2 eta with xi - eta = a and eta = b.
      const double m0 = h * (a.k1 - b.k1) / denom;
      const double m1 = h * (a.k2 - b.k2) / denom;
      out.at(0, x1, x2) += m0 * a.v0 * b.v0;
      out.at(1, x1, x2) += m0 * a.v0 * b.v1;
      out.at(2, x1, x2) += m1 * a.v0 * b.v0;
      out.at(3, x1, x2) += m1 * a.v0 * b.v1;
    }
  }
  return out;
}

SpectralField bee(const SpectralField& f, const SpectralField& g) {
  require_same_lattice(f.lattice(), g.lattice(), "bee");
  require_scalar_real(f, "bee");
  require_scalar_real(g, "bee");
  const auto& lat = f.lattice();
  require_quadrature_size(lat, "bee");
  const SpectralField t = tee(sp::apply_symbol(f, sp::MultiplierSpec::power(-1.0)),
                              sp::riesz_velocity(g));
  SpectralField out = sp::inverse_laplacian(sp::double_divergence(t));
  out *= complex{0.0, -1.0};
  out.set_real_valued(true);
  return out;
}

SpectralField bee_block(const SpectralField& f, const SpectralField& g) {
  require_same_lattice(f.lattice(), g.lattice(), "bee_block");
  require_scalar_real(f, "bee_block");
  require_scalar_real(g, "bee_block");
  const auto& lat = f.lattice();
  SpectralField out(lat);
  if (f.is_zero() || g.is_zero()) return out;
  const int p = 2 * lat.size();
  const double scale = 0.5 / (static_cast<double>(p) * p);
  const sp::RealGrid fx = sp::synthesize(f, 0, p);
  const sp::RealGrid gx = sp::synthesize(g, 0, p);
  for (int a = 0; a < 2; ++a) {
    sp::RealGrid w = sp::synthesize(g, 0, p, velocity_weight(lat, a));
    {
      const sp::RealGrid vf = sp::synthesize(f, 0, p, velocity_weight(lat, a));
      double* pw = w.data();
      const double* pf = fx.data();
      const double* pg = gx.data();
      const double* pv = vf.data();
      for (std::size_t i = 0; i < w.size(); ++i) pw[i] = pf[i] * pw[i] + pv[i] * pg[i];
    }
    const sp::HalfSpectrum half = sp::forward_real(std::move(w));
    sp::accumulate_half(half, scale, out, 0, divergence_weight(lat, a));
  }
  out.at(0, 0) = complex{};
  return out;
}

SpectralField bee_diag_fast(const SpectralField& theta) {
  require_scalar_real(theta, "bee_diag_fast");
  const auto& lat = theta.lattice();
  SpectralField out(lat);
  if (theta.is_zero()) return out;
  const int p = 2 * lat.size();
  const double scale = 1.0 / (static_cast<double>(p) * p);
  const sp::RealGrid tx = sp::synthesize(theta, 0, p);
  for (int a = 0; a < 2; ++a) {
    sp::RealGrid u = sp::synthesize(theta, 0, p, velocity_weight(lat, a));
    double* pu = u.data();
    const double* pt = tx.data();
    for (std::size_t i = 0; i < u.size(); ++i) pu[i] *= pt[i];
    const sp::HalfSpectrum half = sp::forward_real(std::move(u));
    sp::accumulate_half(half, scale, out, 0, divergence_weight(lat, a));
  }
  out.at(0, 0) = complex{};
  return out;
}

ShiftedBee::ShiftedBee(const SpectralField& base) : lattice_(base.lattice()) {
  require_scalar_real(base, "ShiftedBee");
  const int p = 2 * lattice_.size();
  const auto keep = [p](const sp::RealGrid& g) { return std::vector<double>(g.data(), g.data() + g.size()); };
  base_ = keep(sp::synthesize(base, 0, p));
  for (int a = 0; a < 2; ++a) velocity_[a] = keep(sp::synthesize(base, 0, p, velocity_weight(lattice_, a)));
}

SpectralField ShiftedBee::operator()(const SpectralField& c) const {
  require_same_lattice(lattice_, c.lattice(), "ShiftedBee");
  require_scalar_real(c, "ShiftedBee");
  SpectralField out(lattice_);
  if (c.is_zero()) return out;
  const int p = 2 * lattice_.size();
  const double scale = 1.0 / (static_cast<double>(p) * p);
  const sp::RealGrid cx = sp::synthesize(c, 0, p);
  for (int a = 0; a < 2; ++a) {
    sp::RealGrid w = sp::synthesize(c, 0, p, velocity_weight(lattice_, a));
    double* pw = w.data();
    const double* pc = cx.data();
    const double* pb = base_.data();
    const double* pv = velocity_[a].data();
    for (std::size_t i = 0; i < w.size(); ++i) pw[i] = (pc[i] + pb[i]) * pw[i] + pc[i] * pv[i];
    const sp::HalfSpectrum half = sp::forward_real(std::move(w));
    sp::accumulate_half(half, scale, out, 0, divergence_weight(lattice_, a));
  }
  out.at(0, 0) = complex{};
  return out;
}

SpectralField advection(const SpectralField& theta) {
  require_scalar_real(theta, "advection");
  const auto& lat = theta.lattice();
  SpectralField out(lat);
  if (theta.is_zero()) return out;
  const int p = 2 * lat.size();
  sp::RealGrid acc(p);
  std::fill(acc.values().begin(), acc.values().end(), 0.0);
  for (int a = 0; a < 2; ++a) {
    const sp::RealGrid u = sp::synthesize(theta, 0, p, velocity_weight(lat, a));
    const sp::RealGrid d = sp::synthesize(theta, 0, p, derivative_weight(lat, a));
    double* pa = acc.data();
    for (std::size_t i = 0; i < acc.size(); ++i) pa[i] += u.data()[i] * d.data()[i];
  }
  sp::analyze(std::move(acc), out, 0);
  return out;
}

complex bee_coefficient(const SpectralField& f, const SpectralField& g, int k1, int k2) {
  require_same_lattice(f.lattice(), g.lattice(), "bee_coefficient");
  const auto& lat = f.lattice();
  if (!lat.holds(k1, k2)) throw PreconditionError("bee_coefficient: frequency outside the lattice");
  if (k1 == 0 && k2 == 0) return {};
  const double h = lat.spacing();
  const double x1 = h * k1, x2 = h * k2;
  const double xi2 = x1 * x1 + x2 * x2;
  complex acc{};
  for (const auto& e : nonzero_entries(g)) {
    const int d1 = k1 - e.k1, d2 = k2 - e.k2;
    if (!lat.holds(d1, d2) || (d1 == 0 && d2 == 0)) continue;
    const complex fv = f.at(d1, d2);
    if (fv == complex{}) continue;
    const double e1 = h * e.k1, e2 = h * e.k2;
    const double re = lat.modulus(e.k1, e.k2);
    const double rd = lat.modulus(d1, d2);
    const double perp = -x1 * e2 + x2 * e1;
    const double shift = x1 * (2.0 * e1 - x1) + x2 * (2.0 * e2 - x2);
    acc += 0.5 * perp * shift / (xi2 * (re + rd)) * (fv / rd) * (e.v0 / re);
  }
  return acc;
}

BilinearForm::BilinearForm(Variant variant, const FrequencyLattice& lattice)
    : variant_(variant), lattice_(lattice) {
  if (variant_ == Variant::quadrature) require_quadrature_size(lattice_, "BilinearForm");
}

SpectralField BilinearForm::operator()(const SpectralField& f, const SpectralField& g) const {
  require_same_lattice(f.lattice(), lattice_, "BilinearForm");
  require_same_lattice(g.lattice(), lattice_, "BilinearForm");
  switch (variant_) {
    case Variant::quadrature:
      return bee(f, g);
    case Variant::block_fast:
      return bee_block(f, g);
    case Variant::diagonal_fast: {
      SpectralField out = bee_diag_fast(f + g);
      out -= bee_diag_fast(f - g);
      out *= 0.25;
      return out;
    }
  }
  throw Error("unknown bilinear variant");
}

SpectralField BilinearForm::operator()(const SpectralField& theta) const {
  require_same_lattice(theta.lattice(), lattice_, "BilinearForm");
  switch (variant_) {
    case Variant::quadrature:
      return bee(theta, theta);
    case Variant::block_fast:
      return bee_block(theta, theta);
    case Variant::diagonal_fast:
      return bee_diag_fast(theta);
  }
  throw Error("unknown bilinear variant");
}

}  // namespace sqg::bilinear
