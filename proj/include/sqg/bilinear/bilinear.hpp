#pragma once

#include <vector>

#include "sqg/field.hpp"

namespace sqg::bilinear {

// Largest lattice (points per axis) accepted by the direct quadratures.
inline constexpr int quadrature_limit = 128;

// T(xi) = sum_eta (xi - 2 eta) / (2 (|eta| + |xi - eta|)) theta(xi - eta) (x) v(eta),
// dropping eta = 0 and eta = xi. Component (a, b) pairs (xi - 2 eta)_a with v_b.
// The symbol is odd in (xi, eta), so for real inputs T is purely imaginary in
// physical space; the result is flagged complex-valued.
SpectralField tee(const SpectralField& theta, const SpectralField& v);

// B[f, g] by direct quadrature: T = tee((-Delta)^{-1/2} f, grad^perp (-Delta)^{-1/2} g)
// contracted as i xi_a xi_b T_ab / |xi|^2, i.e. -i (-Delta)^{-1} div div T.
// The factor -i is the convention under which B[theta, theta] = (-Delta)^{-1} div(theta u).
SpectralField bee(const SpectralField& f, const SpectralField& g);

// 1/2 (-Delta)^{-1} div { f grad^perp (-Delta)^{-1/2} g + g grad^perp (-Delta)^{-1/2} f },
// evaluated with padded transforms.
SpectralField bee_block(const SpectralField& f, const SpectralField& g);

// (-Delta)^{-1} div(theta u) with u = grad^perp (-Delta)^{-1/2} theta, evaluated
// with padded transforms.
SpectralField bee_diag_fast(const SpectralField& theta);

// c -> B[c, c] + 2 B[base, c] in one padded pass, with the samples of base and
// its velocity cached. Equals bee_diag_fast(c) + 2 bee_block(base, c).
class ShiftedBee {
 public:
  explicit ShiftedBee(const SpectralField& base);
  SpectralField operator()(const SpectralField& c) const;

 private:
  FrequencyLattice lattice_;
  std::vector<double> base_, velocity_[2];
};

// u . grad theta computed from the velocity and gradient samples directly
// (used for independent PDE residuals).
SpectralField advection(const SpectralField& theta);

// Brute-force lattice sum of the symmetric kernel
//   1/2 (xi . eta^perp)(xi . (2 eta - xi)) / (|xi|^2 (|eta| + |xi - eta|)) f(xi - eta)/|xi - eta| g(eta)/|eta|
// at a single output frequency. Independent of the transform paths.
complex bee_coefficient(const SpectralField& f, const SpectralField& g, int k1, int k2);

class BilinearForm {
 public:
  enum class Variant { quadrature, block_fast, diagonal_fast };

  BilinearForm(Variant variant, const FrequencyLattice& lattice);

  Variant variant() const noexcept { return variant_; }
  const FrequencyLattice& lattice() const noexcept { return lattice_; }

  // The diagonal variant evaluates off-diagonal pairs by polarization.
  SpectralField operator()(const SpectralField& f, const SpectralField& g) const;
  SpectralField operator()(const SpectralField& theta) const;

 private:
  Variant variant_;
  FrequencyLattice lattice_;
};

}  // namespace sqg::bilinear
