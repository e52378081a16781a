#include <algorithm>
#include <cmath>
#include <iostream>
#include <mutex>
#include <string>

#include "sqg/error.hpp"
#include "sqg/field.hpp"
#include "sqg/lattice.hpp"

namespace sqg {

namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

WarningSink& current_sink() {
  static WarningSink sink = [](std::string_view message) {
    std::cerr << "sqglab warning: " << message << '\n';
  };
  return sink;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

WarningSink set_warning_sink(WarningSink sink) {
  std::lock_guard lock(sink_mutex());
  WarningSink previous = std::move(current_sink());
  current_sink() = std::move(sink);
  return previous;
}

void warn(std::string_view message) {
  std::lock_guard lock(sink_mutex());
  if (current_sink()) current_sink()(message);
}

FrequencyLattice::FrequencyLattice(int points_per_axis, double spacing)
    : m_(points_per_axis), h_(spacing) {
  if (m_ < 8 || !is_power_of_two(m_)) {
    throw PreconditionError("lattice size must be a power of two >= 8, got " +
                            std::to_string(m_));
  }
  if (!(h_ > 0.0) || !std::isfinite(h_)) {
    throw PreconditionError("lattice spacing must be positive and finite");
  }
}

bool FrequencyLattice::holds_frequency(double xi1, double xi2) const noexcept {
  const double k1 = xi1 / h_;
  const double k2 = xi2 / h_;
  if (k1 != std::round(k1) || k2 != std::round(k2)) return false;
  return holds(static_cast<int>(k1), static_cast<int>(k2));
}

double FrequencyLattice::modulus(int k1, int k2) const noexcept {
  const double n2 = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2;
  return h_ * std::sqrt(n2);
}

double continuum_weight(const FrequencyLattice& lattice) noexcept {
  const double h = lattice.spacing();
  return h * h / (4.0 * std::numbers::pi * std::numbers::pi);
}

void require_same_lattice(const FrequencyLattice& a, const FrequencyLattice& b,
                          const char* where) {
  if (!(a == b)) {
    throw LatticeMismatch(std::string(where) + ": fields live on different lattices (M=" +
                          std::to_string(a.size()) + ", h=" + std::to_string(a.spacing()) +
                          " vs M=" + std::to_string(b.size()) +
                          ", h=" + std::to_string(b.spacing()) + ")");
  }
}

SpectralField::SpectralField(const FrequencyLattice& lattice, Rank rank, bool real_valued)
    : lattice_(lattice),
      rank_(rank),
      real_(real_valued),
      data_(static_cast<std::size_t>(component_count(rank)) * lattice.point_count()) {}

std::span<complex> SpectralField::component(int c) {
  return {data_.data() + offset(c), lattice_.point_count()};
}

std::span<const complex> SpectralField::component(int c) const {
  return {data_.data() + offset(c), lattice_.point_count()};
}

double SpectralField::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& z : data_) m = std::max(m, std::abs(z));
  return m;
}

double SpectralField::coefficient_norm() const noexcept {
  // Scaled accumulation keeps strongly graded spectra from overflowing.
  const double scale = max_abs();
  if (scale == 0.0) return 0.0;
  long double acc = 0.0L;
  for (const auto& z : data_) {
    const double a = std::abs(z) / scale;
    acc += static_cast<long double>(a) * a;
  }
  return scale * static_cast<double>(std::sqrt(acc));
}

bool SpectralField::is_zero() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](const complex& z) { return z == complex{}; });
}

double SpectralField::hermitian_defect() const noexcept {
  const int kmax = lattice_.max_wavenumber();
  double defect = 0.0;
  for (int c = 0; c < components(); ++c) {
    for (int k1 = -kmax; k1 <= kmax; ++k1) {
      for (int k2 = -kmax; k2 <= kmax; ++k2) {
        defect = std::max(defect, std::abs(at(c, -k1, -k2) - std::conj(at(c, k1, k2))));
      }
    }
  }
  return defect;
}

void SpectralField::clear_nyquist() {
  const int m = lattice_.size();
  const int nyq = m / 2;  // storage index of k = -M/2
  for (int c = 0; c < components(); ++c) {
    auto comp = component(c);
    for (int i = 0; i < m; ++i) {
      comp[static_cast<std::size_t>(nyq) * m + i] = complex{};
      comp[static_cast<std::size_t>(i) * m + nyq] = complex{};
    }
  }
}

void SpectralField::require_compatible(const SpectralField& other) const {
  require_same_lattice(lattice_, other.lattice_, "field arithmetic");
  if (rank_ != other.rank_) throw PreconditionError("field arithmetic: rank mismatch");
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_compatible(other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  real_ = real_ && other.real_;
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_compatible(other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  real_ = real_ && other.real_;
  return *this;
}

SpectralField& SpectralField::operator*=(double factor) {
  for (auto& z : data_) z *= factor;
  return *this;
}

SpectralField& SpectralField::operator*=(complex factor) {
  for (auto& z : data_) z *= factor;
  if (factor.imag() != 0.0) real_ = false;
  return *this;
}

SpectralField operator+(SpectralField lhs, const SpectralField& rhs) { return lhs += rhs; }
SpectralField operator-(SpectralField lhs, const SpectralField& rhs) { return lhs -= rhs; }
SpectralField operator*(double factor, SpectralField field) { return field *= factor; }
SpectralField operator*(SpectralField field, double factor) { return field *= factor; }

double relative_distance(const SpectralField& a, const SpectralField& b) {
  const double scale = std::max(a.coefficient_norm(), b.coefficient_norm());
  if (scale == 0.0) return 0.0;
  return (a - b).coefficient_norm() / scale;
}

}  // namespace sqg
