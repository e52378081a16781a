#pragma once

#include <array>
#include <numbers>

#include "sqg/field.hpp"
#include "sqg/lp/partition.hpp"

namespace sqg::lp {

// Frequency bump centred at 2^j a with radius 2^{j-gap}:
//   psi_j(xi) = 1 - sum_{k >= j-gap} phi_k(xi - 2^j a) = sigma(2^{gap+1-j} |xi - 2^j a|).
struct ProbeFunction {
  int j;
  int gap;
  std::array<double, 2> a;
  CutProfile profile;

  std::array<double, 2> center() const noexcept;
  double radius() const noexcept;

  double closed_form(double xi1, double xi2) const noexcept;
  // The defining series, summed over the finitely many nonvanishing terms.
  double definitional(double xi1, double xi2) const noexcept;
};

inline constexpr std::array<double, 2> diagonal_direction{std::numbers::sqrt2 / 2.0,
                                                          std::numbers::sqrt2 / 2.0};

// Throws PreconditionError for gap < 3 (psi_j = phi_j * psi_j needs the probe
// inside the shell plateau) or a non-unit direction, SpectrumOverflow when the
// support leaves the box and EmptySupport when it holds no lattice point.
ProbeFunction build_probe(const FrequencyLattice& lattice, int j, int gap = 3,
                          std::array<double, 2> a = diagonal_direction, CutProfile profile = {});

// Smallest shell whose probe (for the given gap) contains a lattice point:
// the probe radius must reach at least the spacing.
int lowest_probe_shell(const FrequencyLattice& lattice, int gap = 3);

// psi_j * f, a complex-valued field (the probe is not even in xi).
SpectralField probe_project(const SpectralField& f, const ProbeFunction& probe);

}  // namespace sqg::lp
