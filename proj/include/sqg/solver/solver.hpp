#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sqg/field.hpp"
#include "sqg/lp/besov.hpp"

namespace sqg::solver {

// Sign s in theta = Lf + s B[theta, theta]. Rearranging -Delta theta + u . grad theta = f
// gives s = -1; the literal reading of the reformulated equation gives +1.
enum class NonlinearSign { pde = -1, paper_literal = 1 };

inline double sign_value(NonlinearSign s) noexcept { return static_cast<int>(s); }

struct SolveConfig {
  lp::BesovIndex index = lp::BesovIndex::solution(4.0, 2.0);
  double tol = 1e-10;
  int max_iter = 64;
  NonlinearSign sign = NonlinearSign::pde;
  // Iterates whose norm exceeds this bound are declared divergent.
  double blowup = 1e100;
  // Evaluate the PDE residual after every iteration rather than only at the end.
  bool pde_residual_each_iteration = true;

  // Data index matching index (s - 2, p, q).
  lp::BesovIndex data_index() const;
  void validate() const;
};

enum class Verdict { converged, max_iterations, diverged };

const char* to_string(Verdict v) noexcept;

struct IterationRecord {
  int iteration;
  double norm;          // ||theta_n|| in the solution norm
  double residual;      // ||theta_n - theta_{n-1}|| / ||theta_n||
  double ratio;         // residual_n / residual_{n-1} on absolute residuals (0 for n = 1)
  double pde_residual;  // ||-Delta theta + u . grad theta - f||_data / ||f||_data, nan if skipped
};

struct IterationTrace {
  std::vector<IterationRecord> records;
  Verdict verdict = Verdict::max_iterations;
  std::string message;
  double data_norm = 0.0;
  double fixed_point_residual = 0.0;  // ||theta - Lf - s B[theta, theta]|| / ||theta||
  double pde_residual = 0.0;

  // Largest ratio over iterations >= from.
  double max_ratio(int from = 2) const;
};

struct SolveResult {
  SpectralField theta;
  IterationTrace trace;
};

// Picard iteration theta_{n+1} = Lf + s B[theta_n, theta_n] from theta_0 = 0
// (or the supplied initial guess).
SolveResult picard_solve(const SpectralField& f, const SolveConfig& config,
                         const std::optional<SpectralField>& initial = std::nullopt);

// Solves for the correction in theta = theta1 + theta2 + correction, where
// theta1 = Lf and theta solves theta = Lf + s B[theta, theta]:
//   c = s (B11 + 2 B12 + B22 + 2 B[theta1 + theta2, c] + B[c, c]) - theta2.
// When theta2 = s B[theta1, theta1] the first and last terms cancel.
SolveResult perturbation_solve(const SpectralField& theta1, const SpectralField& theta2,
                               const SolveConfig& config);

// Relative PDE residual ||-Delta theta + u . grad theta - f||_data / ||f||_data
// (absolute when f = 0).
double pde_residual(const SpectralField& theta, const SpectralField& f,
                    const lp::BesovIndex& data_index);

// ||theta - Lf - s B[theta, theta]||_index / ||theta||_index.
double fixed_point_residual(const SpectralField& theta, const SpectralField& f,
                            const SolveConfig& config);

// CSV "iteration,norm,residual,ratio,pde_residual".
void write_trace_csv(std::ostream& out, const IterationTrace& trace);

struct ConstantsReport {
  double c0 = 0.0;
  double c1 = 0.0;
  double delta0 = 0.0;    // 1 / (8 C0 C1)
  double epsilon0 = 0.0;  // 1 / (4 C1)
  int samples = 0;
  std::uint64_t seed = 0;
  int lattice_size = 0;
  double lattice_spacing = 0.0;
  double p = 4.0;
  double q = 2.0;
  int shell_low = 0;
  int shell_high = 0;

  std::string to_json() const;
};

struct ConstantsOptions {
  double p = 4.0;
  double q = 2.0;
  std::uint64_t seed = 1;
  // Shell range for sampled fields; defaults to the interior of the window,
  // keeping every sampled support below half the Nyquist frequency.
  std::optional<int> shell_low;
  std::optional<int> shell_high;
};

// Samples C0 over single-shell data and C1 over pairs of shell-localized or
// broadband fields. Throws for samples < 50.
ConstantsReport estimate_constants(const FrequencyLattice& lattice, int samples,
                                   const ConstantsOptions& options = {});

// Interior shell range used by default: [j_min + 1, floor(log2(nyquist / 2)) - 1].
std::pair<int, int> sampling_shells(const FrequencyLattice& lattice);

}  // namespace sqg::solver
