#include "sqg/random.hpp"

#include <cmath>

#include "sqg/error.hpp"

namespace sqg {

SpectralField random_field(const FrequencyLattice& lattice, double r_min, double r_max,
                           std::mt19937_64& rng, double slope) {
  if (!(r_min >= 0.0 && r_max > r_min)) throw PreconditionError("random_field: invalid band");
  const double h = lattice.spacing();
  const int extent = static_cast<int>(std::ceil(r_max / h));
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectralField f(lattice);
  for (int k1 = -extent; k1 <= extent; ++k1) {
    for (int k2 = 0; k2 <= extent; ++k2) {
      const double re = normal(rng);
      const double im = normal(rng);
      if (k2 == 0 && k1 <= 0) continue;
      if (!lattice.holds(k1, k2)) continue;
      const double r = lattice.modulus(k1, k2);
      if (r < r_min || r > r_max) continue;
      const complex v = std::pow(r, slope) * complex{re, im};
      f.at(k1, k2) = v;
      f.at(-k1, -k2) = std::conj(v);
    }
  }
  return f;
}

}  // namespace sqg
