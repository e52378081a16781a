#pragma once

#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "sqg/field.hpp"
#include "sqg/lp/partition.hpp"

namespace sqg::lp {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

// Homogeneous Besov index (s, p, q) with p, q in [1, inf].
struct BesovIndex {
  double s;
  double p;
  double q;

  BesovIndex(double s, double p, double q);

  // Scaling-critical data index s = 2/p - 3.
  static BesovIndex data(double p, double q);
  // Scaling-critical solution index s = 2/p - 1.
  static BesovIndex solution(double p, double q);

  bool is_data_critical() const noexcept;
  bool is_solution_critical() const noexcept;
};

// L^p norm over the box of a set of physical samples with weight cell_area
// per sample (max norm for p = inf). Accumulation is scaled by the maximum.
double lp_norm(std::span<const double> samples, double cell_area, double p);
double lp_norm(std::span<const complex> samples, double cell_area, double p);

// L^p norm of a field's physical samples on a grid of oversample * M points
// per axis (oversample a power of two). Complex-valued fields use oversample 1.
double lp_norm(const SpectralField& f, double p, int oversample = 1);

// Smallest power-of-two oversampling (at most cap) for which the grid
// quadrature of |f|^p is exact: p an even integer and oversample * M > p K,
// K the largest per-axis wavenumber of f. Returns 1 for other p.
int exact_oversample(const SpectralField& f, double p, int cap = 4);

struct ShellEntry {
  int j;
  double value;  // 2^{sj} ||phi_j * f||_{L^p}
};

struct ShellProfile {
  std::vector<ShellEntry> entries;  // active shells only, ascending j
  // Fraction of coefficient energy not reproduced by the window's partition sum.
  double out_of_window_fraction = 0.0;
};

struct NormOptions {
  int oversample = 1;
  // Emit a warning when the out-of-window fraction exceeds this value.
  double warn_threshold = 1e-12;
};

ShellProfile shell_profile(const SpectralField& f, const DyadicPartition& partition, double s,
                           double p, const NormOptions& options = {});
ShellProfile shell_profile(const SpectralField& f, double s, double p,
                           const NormOptions& options = {});

// l^q norm of nonnegative values (max for q = inf); sorted ascending and
// accumulated in extended precision.
double aggregate_lq(std::span<const double> values, double q);
double aggregate_lq(const ShellProfile& profile, double q);

double besov_norm(const SpectralField& f, const DyadicPartition& partition,
                  const BesovIndex& index, const NormOptions& options = {});
double besov_norm(const SpectralField& f, const BesovIndex& index,
                  const NormOptions& options = {});

// CSV rows "j,shell_value" with a header.
void write_profile_csv(std::ostream& out, const ShellProfile& profile);

}  // namespace sqg::lp
