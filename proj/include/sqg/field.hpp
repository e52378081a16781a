#pragma once

#include <complex>
#include <span>
#include <vector>

#include "sqg/lattice.hpp"

namespace sqg {

using complex = std::complex<double>;

enum class Rank { scalar = 1, vector = 2, tensor = 4 };

constexpr int component_count(Rank rank) noexcept { return static_cast<int>(rank); }

// A field stored as Fourier-series coefficients on a FrequencyLattice:
//   f(x) = sum_k c(k) exp(i h k . x).
// Vector components are (u1, u2); tensor components are row-major (a, b) -> 2a + b.
//
// Fields that represent real functions are Hermitian, c(-k) = conj(c(k)). Probe
// projections are the one place where complex-valued fields appear; they carry
// real_valued() == false and are evaluated with complex transforms.
class SpectralField {
 public:
  explicit SpectralField(const FrequencyLattice& lattice, Rank rank = Rank::scalar,
                         bool real_valued = true);

  const FrequencyLattice& lattice() const noexcept { return lattice_; }
  Rank rank() const noexcept { return rank_; }
  int components() const noexcept { return component_count(rank_); }
  bool real_valued() const noexcept { return real_; }
  void set_real_valued(bool real) noexcept { real_ = real; }

  std::span<complex> component(int c);
  std::span<const complex> component(int c) const;

  complex& at(int c, int k1, int k2) { return data_[offset(c) + lattice_.flat(k1, k2)]; }
  const complex& at(int c, int k1, int k2) const {
    return data_[offset(c) + lattice_.flat(k1, k2)];
  }
  complex& at(int k1, int k2) { return at(0, k1, k2); }
  const complex& at(int k1, int k2) const { return at(0, k1, k2); }

  complex mean(int c = 0) const { return at(c, 0, 0); }

  // Largest coefficient modulus over all components.
  double max_abs() const noexcept;
  // Euclidean norm of the coefficient vector (equals the box-averaged L2 norm).
  double coefficient_norm() const noexcept;
  bool is_zero() const noexcept;

  // max_k |c(-k) - conj(c(k))| over all components.
  double hermitian_defect() const noexcept;

  // Zeroes the unpaired Nyquist lines.
  void clear_nyquist();

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double factor);
  SpectralField& operator*=(complex factor);

 private:
  std::size_t offset(int c) const noexcept {
    return static_cast<std::size_t>(c) * lattice_.point_count();
  }
  void require_compatible(const SpectralField& other) const;

  FrequencyLattice lattice_;
  Rank rank_;
  bool real_;
  std::vector<complex> data_;
};

SpectralField operator+(SpectralField lhs, const SpectralField& rhs);
SpectralField operator-(SpectralField lhs, const SpectralField& rhs);
SpectralField operator*(double factor, SpectralField field);
SpectralField operator*(SpectralField field, double factor);

// Relative coefficient-space distance |a - b| / max(|a|, |b|), 0 when both vanish.
double relative_distance(const SpectralField& a, const SpectralField& b);

// Throws LatticeMismatch when the lattices differ.
void require_same_lattice(const FrequencyLattice& a, const FrequencyLattice& b,
                          const char* where);

}  // namespace sqg
