#pragma once

#include <cstddef>
#include <numbers>

namespace sqg {

// Square frequency lattice h*(k1,k2), k_i in [-M/2, M/2), standing in for the
// frequency plane. The induced physical grid is periodic with side L = 2*pi/h.
//
// Storage order is the FFT order used throughout the library: index i maps to
// wavenumber k = i for i < M/2 and k = i - M otherwise, row-major with k1 as
// the slow index. The unpaired Nyquist lines (k1 = -M/2 or k2 = -M/2) carry no
// data; every operation keeps them at zero.
class FrequencyLattice {
 public:
  FrequencyLattice(int points_per_axis, double spacing);

  int size() const noexcept { return m_; }
  double spacing() const noexcept { return h_; }
  double box_side() const noexcept { return 2.0 * std::numbers::pi / h_; }
  double nyquist() const noexcept { return h_ * m_ / 2.0; }
  double grid_step() const noexcept { return box_side() / m_; }
  // Quadrature weight of one physical sample, (L/M)^2.
  double cell_area() const noexcept { return grid_step() * grid_step(); }
  std::size_t point_count() const noexcept {
    return static_cast<std::size_t>(m_) * static_cast<std::size_t>(m_);
  }

  // Largest |k_i| that may carry data.
  int max_wavenumber() const noexcept { return m_ / 2 - 1; }

  int wavenumber(int index) const noexcept { return index < m_ / 2 ? index : index - m_; }
  int index_of(int k) const noexcept { return k >= 0 ? k : k + m_; }

  bool holds(int k1, int k2) const noexcept {
    const int kmax = max_wavenumber();
    return k1 >= -kmax && k1 <= kmax && k2 >= -kmax && k2 <= kmax;
  }
  // True when h*k is representable, i.e. x/h is an integer within the box.
  bool holds_frequency(double xi1, double xi2) const noexcept;

  std::size_t flat(int k1, int k2) const noexcept {
    return static_cast<std::size_t>(index_of(k1)) * static_cast<std::size_t>(m_) +
           static_cast<std::size_t>(index_of(k2));
  }

  // Frequency |xi| of the signed wavenumber pair.
  double modulus(int k1, int k2) const noexcept;

  bool operator==(const FrequencyLattice& other) const noexcept = default;

 private:
  int m_;
  double h_;
};

// Lattice coefficient weight h^2/(2 pi)^2 converting a continuum Fourier
// transform sample fhat(xi) into the Fourier-series coefficient of the
// periodized function. The Riemann sum h^2 * sum_eta then stands in for the
// integral over eta.
double continuum_weight(const FrequencyLattice& lattice) noexcept;

}  // namespace sqg
