#pragma once

#include <cstdint>
#include <random>

#include "sqg/field.hpp"

namespace sqg {

// Complex Gaussian coefficients on the band r_min <= |xi| <= r_max, scaled by
// |xi|^slope, Hermitian-symmetrized and mean-free. Draws run over the fixed
// wavenumber square |k_i| <= ceil(r_max / h) in a lattice-independent order,
// so two lattices with the same spacing receive the same field wherever both
// hold the band.
SpectralField random_field(const FrequencyLattice& lattice, double r_min, double r_max,
                           std::mt19937_64& rng, double slope = 0.0);

}  // namespace sqg
