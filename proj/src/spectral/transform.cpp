#include "sqg/spectral/transform.hpp"

#include <fftw3.h>

#include <atomic>
#include <mutex>
#include <string>

#include "sqg/error.hpp"

namespace sqg::spectral {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::atomic<int> g_threads{1};
std::atomic<std::size_t> g_limit{std::size_t{2} << 30};

void ensure_threads_initialized() {
  static const bool ok = fftw_init_threads() != 0;
  (void)ok;
}

void check_buffer(std::size_t bytes) {
  if (bytes > g_limit.load()) {
    throw ResourceLimit("transform buffer of " + std::to_string(bytes) +
                        " bytes exceeds the configured limit of " +
                        std::to_string(g_limit.load()) + " bytes");
  }
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Plans are created per call; FFTW_ESTIMATE keeps planning cheap and leaves
// the buffers untouched.
template <class MakePlan>
void run_plan(MakePlan&& make) {
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    ensure_threads_initialized();
    fftw_plan_with_nthreads(g_threads.load());
    plan = make();
  }
  if (plan == nullptr) throw Error("FFTW failed to create a plan");
  fftw_execute(plan);
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan);
}

}  // namespace

void set_fft_threads(int threads) {
  if (threads < 1) throw PreconditionError("thread count must be >= 1");
  g_threads.store(threads);
}

int fft_threads() noexcept { return g_threads.load(); }

void set_buffer_limit(std::size_t bytes) { g_limit.store(bytes); }
std::size_t buffer_limit() noexcept { return g_limit.load(); }

namespace detail {

void FftwDeleter::operator()(void* p) const noexcept { fftw_free(p); }

void* fftw_allocate(std::size_t bytes) {
  check_buffer(bytes);
  void* p = fftw_malloc(bytes);
  if (p == nullptr) throw ResourceLimit("allocation of " + std::to_string(bytes) + " bytes failed");
  return p;
}

void check_pack(const SpectralField& f, int c, int n) {
  if (!f.real_valued()) {
    throw PreconditionError("real transform requested for a complex-valued field");
  }
  if (c < 0 || c >= f.components()) throw PreconditionError("component index out of range");
  if (!is_power_of_two(n) || n < f.lattice().size()) {
    throw PreconditionError("transform grid must be a power of two >= M, got " +
                            std::to_string(n));
  }
}

}  // namespace detail

RealGrid::RealGrid(int n)
    : n_(n),
      data_(static_cast<double*>(detail::fftw_allocate(sizeof(double) * size()))) {}

ComplexGrid::ComplexGrid(int n)
    : n_(n),
      data_(static_cast<complex*>(detail::fftw_allocate(sizeof(complex) * size()))) {}

HalfSpectrum::HalfSpectrum(int n)
    : n_(n),
      data_(static_cast<complex*>(detail::fftw_allocate(
          sizeof(complex) * static_cast<std::size_t>(n) * (n / 2 + 1)))) {
  std::fill_n(data_.get(), static_cast<std::size_t>(n_) * columns(), complex{});
}

RealGrid inverse_real(HalfSpectrum&& spectrum) {
  const int n = spectrum.n();
  RealGrid grid(n);
  run_plan([&] {
    return fftw_plan_dft_c2r_2d(n, n, reinterpret_cast<fftw_complex*>(spectrum.data()),
                                grid.data(), FFTW_ESTIMATE);
  });
  HalfSpectrum released = std::move(spectrum);
  return grid;
}

HalfSpectrum forward_real(RealGrid&& grid) {
  const int n = grid.n();
  HalfSpectrum half(n);
  run_plan([&] {
    return fftw_plan_dft_r2c_2d(n, n, grid.data(), reinterpret_cast<fftw_complex*>(half.data()),
                                FFTW_ESTIMATE);
  });
  RealGrid released = std::move(grid);
  return half;
}

void inverse_complex(ComplexGrid& grid) {
  const int n = grid.n();
  auto* p = reinterpret_cast<fftw_complex*>(grid.data());
  run_plan([&] { return fftw_plan_dft_2d(n, n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE); });
}

void forward_complex(ComplexGrid& grid) {
  const int n = grid.n();
  auto* p = reinterpret_cast<fftw_complex*>(grid.data());
  run_plan([&] { return fftw_plan_dft_2d(n, n, p, p, FFTW_FORWARD, FFTW_ESTIMATE); });
}

RealGrid synthesize(const SpectralField& f, int c, int n) {
  return inverse_real(pack_half(f, c, n));
}

RealGrid synthesize(const SpectralField& f, int c) {
  return synthesize(f, c, f.lattice().size());
}

ComplexGrid synthesize_complex(const SpectralField& f, int c) {
  if (c < 0 || c >= f.components()) throw PreconditionError("component index out of range");
  ComplexGrid grid(f.lattice().size());
  const auto comp = f.component(c);
  std::copy(comp.begin(), comp.end(), grid.data());
  inverse_complex(grid);
  return grid;
}

void unpack_half(const HalfSpectrum& half, double scale, SpectralField& out, int c) {
  const int kmax = out.lattice().max_wavenumber();
  if (half.n() < out.lattice().size()) throw PreconditionError("spectrum smaller than lattice");
  for (int k1 = -kmax; k1 <= kmax; ++k1) {
    for (int k2 = 0; k2 <= kmax; ++k2) {
      const complex v = scale * half.at(k1, k2);
      out.at(c, k1, k2) = v;
      if (k2 > 0) out.at(c, -k1, -k2) = std::conj(v);
    }
  }
}

void analyze(RealGrid&& grid, SpectralField& out, int c) {
  const double n = grid.n();
  const HalfSpectrum half = forward_real(std::move(grid));
  unpack_half(half, 1.0 / (n * n), out, c);
}

}  // namespace sqg::spectral
