#pragma once

#include <iosfwd>
#include <vector>

#include "sqg/field.hpp"

namespace sqg::lp {

// rho(t) = e(t) / (e(t) + e(1 - t)) with e(t) = exp(-1/t) for t > 0, else 0.
double smooth_step(double t) noexcept;

// Radial cut sigma: 1 on [0, inner], 0 on [outer, inf), smooth in between.
struct CutProfile {
  double inner = 1.25;
  double outer = 1.75;
};

double radial_cut(double r, const CutProfile& profile) noexcept;

// Throws PreconditionError unless 5/4 <= inner < outer <= 7/4, the range in
// which support [1/2, 2], plateau [7/8, 5/4] and 0 <= phi <= 1 all hold.
void validate_profile(const CutProfile& profile);

// phi_j(xi) = sigma(2^{-j}|xi|) - sigma(2^{1-j}|xi|) over the shell window
// [j_min, j_max].
class DyadicPartition {
 public:
  DyadicPartition(const FrequencyLattice& lattice, CutProfile profile, int j_min, int j_max);

  const FrequencyLattice& lattice() const noexcept { return lattice_; }
  const CutProfile& profile() const noexcept { return profile_; }
  int j_min() const noexcept { return j_min_; }
  int j_max() const noexcept { return j_max_; }
  bool covers(int j) const noexcept { return j >= j_min_ && j <= j_max_; }

  // phi_j at |xi| = r (any integer j, not only inside the window).
  double phi(int j, double r) const noexcept;
  // Sum of phi_j over the window, evaluated in telescoped form.
  double window_sum(double r) const noexcept;
  // Lattice modulus range on which phi_j may be nonzero.
  double support_inner(int j) const noexcept;
  double support_outer(int j) const noexcept;

 private:
  FrequencyLattice lattice_;
  CutProfile profile_;
  int j_min_;
  int j_max_;
};

// Window [floor(log2 h), ceil(log2(sqrt(2) * nyquist))]: every nonzero lattice
// frequency is covered and the window sum equals 1 on the whole box.
DyadicPartition build_partition(const FrequencyLattice& lattice, CutProfile profile = {});
DyadicPartition build_partition(const FrequencyLattice& lattice, int j_min, int j_max,
                                CutProfile profile = {});

// Coefficientwise multiplication by phi_j.
SpectralField shell_project(const SpectralField& f, const DyadicPartition& partition, int j);

// True when some nonzero coefficient of f lies where phi_j > 0.
bool shell_active(const SpectralField& f, const DyadicPartition& partition, int j);

// CSV dump (r, phi_j for each requested shell) on a uniform radial grid.
void write_partition_dump(std::ostream& out, const DyadicPartition& partition,
                          const std::vector<int>& shells, int samples);

}  // namespace sqg::lp
