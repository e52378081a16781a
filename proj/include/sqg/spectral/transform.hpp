#pragma once

#include <cstddef>
#include <memory>
#include <span>

#include "sqg/field.hpp"

namespace sqg::spectral {

// Number of threads FFTW may use for subsequent plans (default 1).
void set_fft_threads(int threads);
int fft_threads() noexcept;

// Upper bound, in bytes, on a single transform buffer. Requests above it throw
// ResourceLimit before any allocation happens. Default 2 GiB.
void set_buffer_limit(std::size_t bytes);
std::size_t buffer_limit() noexcept;

namespace detail {
struct FftwDeleter {
  void operator()(void* p) const noexcept;
};
void* fftw_allocate(std::size_t bytes);
// Throws unless f is real-valued and n is a power of two >= M.
void check_pack(const SpectralField& f, int c, int n);
}  // namespace detail

// n x n real samples of a periodic function on the box, row-major with x1 slow.
class RealGrid {
 public:
  explicit RealGrid(int n);
  int n() const noexcept { return n_; }
  double* data() noexcept { return data_.get(); }
  const double* data() const noexcept { return data_.get(); }
  std::span<double> values() noexcept { return {data_.get(), size()}; }
  std::span<const double> values() const noexcept { return {data_.get(), size()}; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(n_) * n_; }

 private:
  int n_;
  std::unique_ptr<double, detail::FftwDeleter> data_;
};

// n x n complex samples (probe projections) or a full coefficient block in FFT order.
class ComplexGrid {
 public:
  explicit ComplexGrid(int n);
  int n() const noexcept { return n_; }
  complex* data() noexcept { return data_.get(); }
  std::span<complex> values() noexcept { return {data_.get(), size()}; }
  std::span<const complex> values() const noexcept { return {data_.get(), size()}; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(n_) * n_; }

 private:
  int n_;
  std::unique_ptr<complex, detail::FftwDeleter> data_;
};

// Non-redundant half of a Hermitian spectrum on an n x n grid: wavenumbers
// k1 in [-n/2, n/2), k2 in [0, n/2]. Zero-initialized.
class HalfSpectrum {
 public:
  explicit HalfSpectrum(int n);
  int n() const noexcept { return n_; }
  int columns() const noexcept { return n_ / 2 + 1; }
  complex* data() noexcept { return data_.get(); }
  complex& at(int k1, int k2) noexcept {
    const int row = k1 >= 0 ? k1 : k1 + n_;
    return data_.get()[static_cast<std::size_t>(row) * columns() + k2];
  }
  const complex& at(int k1, int k2) const noexcept {
    const int row = k1 >= 0 ? k1 : k1 + n_;
    return data_.get()[static_cast<std::size_t>(row) * columns() + k2];
  }

 private:
  int n_;
  std::unique_ptr<complex, detail::FftwDeleter> data_;
};

// Unnormalized synthesis sum_k c(k) exp(2 pi i k.m / n). Consumes the spectrum.
RealGrid inverse_real(HalfSpectrum&& spectrum);
// Unnormalized analysis sum_m f(m) exp(-2 pi i k.m / n). Consumes the grid.
HalfSpectrum forward_real(RealGrid&& grid);
// In-place complex transforms with the same sign conventions.
void inverse_complex(ComplexGrid& grid);
void forward_complex(ComplexGrid& grid);

// Packs component c of a real-valued field into an n-point half spectrum,
// multiplying each coefficient by weight(k1, k2) (a complex or real value).
template <class Weight>
HalfSpectrum pack_half(const SpectralField& f, int c, int n, Weight&& weight) {
  detail::check_pack(f, c, n);
  HalfSpectrum half(n);
  const auto& lat = f.lattice();
  const int kmax = lat.max_wavenumber();
  for (int k1 = -kmax; k1 <= kmax; ++k1) {
    for (int k2 = 0; k2 <= kmax; ++k2) {
      const complex v = f.at(c, k1, k2);
      if (v == complex{}) continue;
      half.at(k1, k2) = v * weight(k1, k2);
    }
  }
  return half;
}

inline HalfSpectrum pack_half(const SpectralField& f, int c, int n) {
  return pack_half(f, c, n, [](int, int) { return 1.0; });
}

// Physical samples of component c of a real-valued field on an n x n grid (n >= M).
template <class Weight>
RealGrid synthesize(const SpectralField& f, int c, int n, Weight&& weight) {
  return inverse_real(pack_half(f, c, n, std::forward<Weight>(weight)));
}

RealGrid synthesize(const SpectralField& f, int c, int n);
RealGrid synthesize(const SpectralField& f, int c = 0);

// Physical samples (n = M) of any field component, real-valued or not.
ComplexGrid synthesize_complex(const SpectralField& f, int c = 0);

// Writes the box-restricted coefficients scale * half(k) into component c of
// out (negative k2 by Hermitian symmetry). Nyquist lines stay zero.
void unpack_half(const HalfSpectrum& half, double scale, SpectralField& out, int c);

// out(k) += scale * weight(k1, k2) * half(k) over the box, with the k2 < 0
// half filled by conjugation. weight(-k) must equal conj(weight(k)).
template <class Weight>
void accumulate_half(const HalfSpectrum& half, double scale, SpectralField& out, int c,
                     Weight&& weight) {
  const int kmax = out.lattice().max_wavenumber();
  for (int k1 = -kmax; k1 <= kmax; ++k1) {
    for (int k2 = 0; k2 <= kmax; ++k2) {
      const complex v = scale * (half.at(k1, k2) * weight(k1, k2));
      out.at(c, k1, k2) += v;
      if (k2 > 0) out.at(c, -k1, -k2) += std::conj(v);
    }
  }
}

// Coefficients of real samples on an n x n grid (n >= M), truncated to the box.
void analyze(RealGrid&& grid, SpectralField& out, int c);

}  // namespace sqg::spectral
