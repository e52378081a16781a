#pragma once

#include "sqg/field.hpp"
#include "sqg/spectral/multiplier.hpp"

namespace sqg::spectral {

// Coefficientwise m(xi) * f(xi). A scalar multiplier acts on every component;
// a vector-valued multiplier maps a scalar field to a vector field. Throws
// NonFiniteAmplitude if a nonzero coefficient is mapped to inf or nan.
SpectralField apply_symbol(const SpectralField& f, const MultiplierSpec& m);

// (-Delta)^{-1} f.
SpectralField inverse_laplacian(const SpectralField& f);
// u = grad^perp (-Delta)^{-1/2} theta.
SpectralField riesz_velocity(const SpectralField& theta);
// (d1 f, d2 f).
SpectralField gradient(const SpectralField& f);
// d1 v1 + d2 v2 for a vector field.
SpectralField divergence(const SpectralField& v);
// sum_ab d_a d_b T_ab for a tensor field.
SpectralField double_divergence(const SpectralField& t);

enum class RescaleVariant {
  solution,  // lambda theta(lambda x)
  forcing,   // lambda^3 f(lambda x)
};

enum class RescalePlacement {
  // The coefficient array is kept and the lattice spacing is multiplied by
  // lambda, so the box shrinks with the function. Norms over the box then
  // follow the whole-plane scaling law exactly.
  dilate_lattice,
  // Coefficients move k -> lambda k on the same lattice. The result is a
  // function of period L / lambda, whose L^p norms over the box follow the
  // periodic scaling law instead (invariant only for p = infinity).
  same_lattice,
};

// lambda = 2^m rescaling of the field. With same_lattice placement, throws
// SpectrumOverflow when the relocated spectrum leaves the box or (m < 0) a
// nonzero coefficient sits off the 2^{-m} sublattice.
SpectralField dyadic_rescale(const SpectralField& f, int m,
                             RescaleVariant variant = RescaleVariant::solution,
                             RescalePlacement placement = RescalePlacement::dilate_lattice);

// Exact product of two scalar fields restricted to the lattice box, computed
// with transforms padded by a factor of two. Complex-valued inputs are
// supported. The mean of the product is kept.
SpectralField multiply(const SpectralField& f, const SpectralField& g);

}  // namespace sqg::spectral
