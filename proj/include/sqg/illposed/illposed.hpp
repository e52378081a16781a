#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sqg/field.hpp"
#include "sqg/lp/besov.hpp"
#include "sqg/lp/partition.hpp"
#include "sqg/solver/solver.hpp"

namespace sqg::illposed {

// Integer exponent map n -> s(n) placing the n-th block at frequency 2^{s(n)}.
class ExponentMap {
 public:
  enum class Kind { square, affine, table };

  // s(n) = n^2.
  static ExponentMap square();
  // s(n) = slope * n + offset.
  static ExponentMap affine(int slope, int offset);
  // s(first + i) = values[i].
  static ExponentMap table(int first, std::vector<int> values);

  Kind kind() const noexcept { return kind_; }
  int operator()(int n) const;
  std::string describe() const;

  // Throws PreconditionError unless s(n + 1) - s(n) >= 2 on [lo, hi].
  void validate(int lo, int hi) const;

 private:
  Kind kind_ = Kind::square;
  int slope_ = 1;
  int offset_ = 0;
  int first_ = 0;
  std::vector<int> values_;
};

enum class Step { step1 = 1, step2 = 2, step3 = 3 };

const char* to_string(Step step) noexcept;

struct ForceSpec {
  Step variant = Step::step1;
  double delta = 0.01;
  int N = 4;
  ExponentMap exponent = ExponentMap::square();
  // Term range of Step 2 and block range of Step 3.
  int block_low = 10;
  int block_high = 10;
  // Step 3 carrier exponent; s(N) when absent.
  std::optional<int> carrier;
  // Step 3 translation stride R; calibrated when absent.
  std::optional<double> stride;
  int probe_gap = 3;
  // Allowed relative departure of ||F||_4^4 from the sum of block fourth powers.
  double overlap_tolerance = 0.05;

  // Paper parameterization: s(n) = n^2, Step 2 terms [10, N], Step 3 blocks
  // [10, N - 50] with carrier N^2.
  static ForceSpec paper(Step variant, int N, double delta = 0.01);

  int carrier_exponent() const;
  // Throws PreconditionError, SpectrumOverflow or EmptySupport when the
  // construction cannot be carried out on the lattice.
  void validate(const FrequencyLattice& lattice) const;
  // Spec plus the paper parameterization it stands in for.
  std::string to_json() const;
};

// chi(r) = rho(2 - r): 1 on [0, 1], 0 on [2, inf).
double chi_hat(double r) noexcept;

// Coefficients of the radial bump chi. Requires spacing <= 1/4.
SpectralField chi_bump(const FrequencyLattice& lattice);

// delta 2^{5N/2} chi(x) cos(2^N x1).
SpectralField force_step1(const FrequencyLattice& lattice, int N, double delta);

// (delta / sqrt(ln N)) sum_n 2^{5 s(n)/2} / sqrt(n) chi(x) cos(2^{s(n)} x1).
SpectralField force_step2(const FrequencyLattice& lattice, const ForceSpec& spec);

struct Step3Forcing {
  SpectralField forcing;  // amplitude * F(x) cos(2^c x1)
  SpectralField envelope; // F(x) = sum_k 2^{-3 s(k)/2} phi_{s(k)}(x - R s(k) e1)
  double stride = 0.0;
  double envelope_l4 = 0.0;
  // sum_k ||2^{-3 s(k)/2} phi_{s(k)}||_4^4
  double block_l4_sum = 0.0;
};

Step3Forcing force_step3(const FrequencyLattice& lattice, const ForceSpec& spec);

// Envelope F for a given stride.
SpectralField step3_envelope(const FrequencyLattice& lattice, const ForceSpec& spec,
                             double stride);

// Smallest stride R = grid_step * 2^i with ||F||_4^4 within overlap_tolerance of
// the sum of the block fourth powers. Throws TranslationCollision when the
// translated blocks no longer fit in one period.
double calibrate_R(const FrequencyLattice& lattice, const ForceSpec& spec);

// Forcing of the spec's variant.
SpectralField build_forcing(const FrequencyLattice& lattice, const ForceSpec& spec);

// Estimated peak memory of a forcing, second iterate and bilinear evaluation
// on an M x M lattice.
double working_set_bytes(int M);
// Physical memory of the host.
std::size_t memory_budget();

// Smallest power-of-two lattice with the given spacing that holds the spec's
// construction. Throws ResourceLimit when its padded transforms would exceed
// the transform buffer limit or its working set the memory budget.
FrequencyLattice required_lattice(const ForceSpec& spec, double spacing);

// theta1 = (-Delta)^{-1} f and theta2 = s B[theta1, theta1].
struct Iterates {
  SpectralField theta1;
  SpectralField theta2;
};

Iterates second_iterate(const SpectralField& f,
                        solver::NonlinearSign sign = solver::NonlinearSign::pde);

// Coefficient of B[theta1, theta1] at one wavenumber, split by the numerator
//   2 xi1 xi2 eta1^2 / |xi|^2
//   + 2 ((xi2^2 - xi1^2) eta1 eta2 - xi1 xi2 eta2^2) / |xi|^2
//   - xi . eta^perp
// over the half plane 2 eta1 > xi1 (weight 2; weight 1 on 2 eta1 = xi1).
struct SplitTerms {
  int k1 = 0;
  int k2 = 0;
  complex main{};
  complex cross{};
  complex perp{};

  complex total() const noexcept { return main + cross + perp; }
  double remainder() const noexcept { return std::abs(cross) + std::abs(perp); }
};

SplitTerms iterate2_split(const SpectralField& theta1, int k1, int k2);
std::vector<SplitTerms> iterate2_split(const SpectralField& theta1,
                                       std::span<const std::array<int, 2>> probes);
// Builds theta1 from the spec; probes must satisfy |xi| <= 1 (Steps 1 and 2) or
// lie below the envelope band (Step 3).
std::vector<SplitTerms> iterate2_split(const FrequencyLattice& lattice, const ForceSpec& spec,
                                       std::span<const std::array<int, 2>> probes);

// Lattice wavenumbers with k1 k2 != 0 and |xi| <= radius.
std::vector<std::array<int, 2>> quadrant_probes(const FrequencyLattice& lattice, double radius,
                                                bool first_quadrant_only = true);

// 2^{-j} ||phi_j * theta||_inf for j in [j_low, j_high].
std::vector<lp::ShellEntry> lowfreq_profile(const SpectralField& theta,
                                            const lp::DyadicPartition& partition, int j_low,
                                            int j_high);
// Maximum of the profile over [j_low, j_high], which must lie in [j_min, -1].
double lowfreq_lower_bound(const SpectralField& theta, int j_low, int j_high);
double lowfreq_lower_bound(const SpectralField& theta, const lp::DyadicPartition& partition,
                           int j_low, int j_high);

struct InflationShell {
  int n;      // block index
  int shell;  // s(n)
};

struct InflationEntry {
  int n;
  int shell;
  double value;  // 2^{-s/2} ||psi_s * theta||_{L^4}
};

struct InflationReport {
  std::vector<InflationEntry> entries;
  std::vector<std::pair<double, double>> aggregates;  // (q, l^q of the entries)
  double data_norm = 0.0;
  double lowfreq_bound = 0.0;
  std::string spec_json;  // echo of the ForceSpec, empty when not built from one

  double aggregate(double q) const;
  std::string to_json() const;
  // CSV "n,shell,value".
  void write_csv(std::ostream& out) const;
};

InflationReport inflation_profile(const SpectralField& theta,
                                  std::span<const InflationShell> shells,
                                  std::span<const double> qs, int gap = 3);

// Full Step 3 pipeline: forcing, second iterate and the inflation profile over
// every block shell, with the data norm at `data_index`.
InflationReport step3_inflation(const FrequencyLattice& lattice, const ForceSpec& spec,
                                std::span<const double> qs, const lp::BesovIndex& data_index);

// ||bee_block(theta1, theta1)|| / ||theta1||^2 at `index` for the Step 1 pair
// theta1 = (-Delta)^{-1} f_N: the sampled bilinear ratio on a localized pair.
double step1_bilinear_ratio(const FrequencyLattice& lattice, int N, double delta,
                            const lp::BesovIndex& index);

struct Step1Options {
  double delta = 0.01;
  double p = 8.0;
  double q = 2.0;
  // Monitoring index and iteration controls for the perturbation solve.
  solver::SolveConfig solve{};
  bool solve_perturbation = true;
  // Low-frequency window; defaults to [j_min, -1].
  std::optional<int> j_low;
  int j_high = -1;
};

struct Step1Row {
  int N = 0;
  double data_norm = 0.0;     // ||f_N|| at (2/p - 3, p, q)
  double theta1_norm = 0.0;   // ||theta1|| at (2/p - 1, p, q)
  double theta2_norm = 0.0;   // ||theta2|| at the monitoring index
  double lowfreq_bound = 0.0;
  double lowfreq_constant = 0.0;  // lowfreq_bound / delta^2
  double perturbation_norm = 0.0; // ||correction|| at the monitoring index, nan if skipped
  double perturbation_ratio = 0.0;
  solver::Verdict verdict = solver::Verdict::converged;
  int iterations = 0;
  double pde_residual = 0.0;
};

Step1Row step1_run(const FrequencyLattice& lattice, int N, const Step1Options& options);
std::vector<Step1Row> step1_sweep(const FrequencyLattice& lattice, std::span<const int> Ns,
                                  const Step1Options& options);

// CSV with one row per N.
void write_step1_csv(std::ostream& out, std::span<const Step1Row> rows);

}  // namespace sqg::illposed
