#include <unistd.h>

#include <cmath>
#include <numbers>
#include <string>

#include <json.hpp>

#include "sqg/error.hpp"
#include "sqg/illposed/illposed.hpp"
#include "sqg/lp/besov.hpp"
#include "sqg/lp/partition.hpp"
#include "sqg/spectral/transform.hpp"

namespace sqg::illposed {

namespace {

double pow2(double e) { return std::exp2(e); }

// Largest frequency a lattice may carry.
double top_frequency(const FrequencyLattice& lat) {
  return lat.spacing() * lat.max_wavenumber();
}

// Wavenumber of the frequency 2^e, or throws when it is not a lattice frequency.
int carrier_wavenumber(const FrequencyLattice& lat, int e, const char* where) {
  const double k = pow2(e) / lat.spacing();
  if (k != std::round(k)) {
    throw PreconditionError(std::string(where) + ": 2^" + std::to_string(e) +
                            " is not a multiple of the lattice spacing");
  }
  return static_cast<int>(k);
}

void require_overflow(const FrequencyLattice& lat, double need, const char* where) {
  if (need > top_frequency(lat)) {
    throw SpectrumOverflow(std::string(where) + ": frequency " + std::to_string(need) +
                           " exceeds the lattice maximum " + std::to_string(top_frequency(lat)));
  }
}

void require_chi_resolved(const FrequencyLattice& lat, const char* where) {
  if (lat.spacing() > 0.25) {
    throw PreconditionError(std::string(where) + ": spacing must be <= 1/4 to resolve chi");
  }
}

// out(k) += amp * w * chi(|xi - center e1|) over the disk of radius 2 about center.
void add_chi(SpectralField& out, int center, double amp) {
  const auto& lat = out.lattice();
  const double h = lat.spacing();
  const double w = continuum_weight(lat);
  const int reach = static_cast<int>(std::ceil(2.0 / h));
  for (int d1 = -reach; d1 <= reach; ++d1) {
    for (int d2 = -reach; d2 <= reach; ++d2) {
      const int k1 = center + d1;
      if (!lat.holds(k1, d2)) continue;
      const double v = chi_hat(lat.modulus(d1, d2));
      if (v != 0.0) out.at(k1, d2) += amp * w * v;
    }
  }
}

void add_cosine_pair(SpectralField& out, int K, double amp) {
  add_chi(out, K, amp / 2.0);
  add_chi(out, -K, amp / 2.0);
}

double log_factor(int N, const char* where) {
  if (N < 2) throw PreconditionError(std::string(where) + ": N >= 2 required (log N > 0)");
  return std::log(static_cast<double>(N));
}

void require_range(const ForceSpec& spec, const char* where) {
  if (spec.block_high < spec.block_low) {
    throw PreconditionError(std::string(where) + ": empty block range");
  }
  if (spec.block_low < 1) throw PreconditionError(std::string(where) + ": block indices start at 1");
  spec.exponent.validate(spec.block_low, spec.block_high);
}

lp::DyadicPartition block_partition(const FrequencyLattice& lat, const ForceSpec& spec) {
  return lp::DyadicPartition(lat, lp::CutProfile{}, spec.exponent(spec.block_low),
                             spec.exponent(spec.block_high));
}

// 2^{-3s/2} phi_s(x - shift e1).
void add_block(SpectralField& out, const lp::DyadicPartition& part, int s, double shift) {
  const auto& lat = out.lattice();
  const double h = lat.spacing();
  const double w = continuum_weight(lat);
  const double amp = w * pow2(-1.5 * s);
  const int reach = std::min(lat.max_wavenumber(),
                             static_cast<int>(std::ceil(part.support_outer(s) / h)));
  for (int k1 = -reach; k1 <= reach; ++k1) {
    const complex phase = std::polar(1.0, -h * k1 * shift);
    for (int k2 = -reach; k2 <= reach; ++k2) {
      const double v = part.phi(s, lat.modulus(k1, k2));
      if (v != 0.0) out.at(k1, k2) += amp * v * phase;
    }
  }
}

double l4_fourth(const SpectralField& f) {
  const double n = lp::lp_norm(f, 4.0, 2);
  return n * n * n * n;
}

double block_sum(const FrequencyLattice& lat, const ForceSpec& spec) {
  const auto part = block_partition(lat, spec);
  double sum = 0.0;
  for (int k = spec.block_low; k <= spec.block_high; ++k) {
    SpectralField b(lat);
    add_block(b, part, spec.exponent(k), 0.0);
    if (b.is_zero()) {
      throw EmptySupport("force_step3: block " + std::to_string(k) +
                         " holds no lattice frequency");
    }
    sum += l4_fourth(b);
  }
  return sum;
}

constexpr double gib = 1024.0 * 1024.0 * 1024.0;

int bits_for(double need, double spacing) {
  int m = 4;
  while (spacing * (m / 2 - 1) < need) m *= 2;
  return m;
}

}  // namespace

// ---- ExponentMap ----

ExponentMap ExponentMap::square() { return ExponentMap{}; }

ExponentMap ExponentMap::affine(int slope, int offset) {
  ExponentMap m;
  m.kind_ = Kind::affine;
  m.slope_ = slope;
  m.offset_ = offset;
  return m;
}

ExponentMap ExponentMap::table(int first, std::vector<int> values) {
  if (values.empty()) throw PreconditionError("ExponentMap::table: no values");
  ExponentMap m;
  m.kind_ = Kind::table;
  m.first_ = first;
  m.values_ = std::move(values);
  return m;
}

int ExponentMap::operator()(int n) const {
  switch (kind_) {
    case Kind::square:
      return n * n;
    case Kind::affine:
      return slope_ * n + offset_;
    case Kind::table: {
      const int i = n - first_;
      if (i < 0 || i >= static_cast<int>(values_.size())) {
        throw PreconditionError("ExponentMap: index " + std::to_string(n) + " outside the table");
      }
      return values_[static_cast<std::size_t>(i)];
    }
  }
  return 0;
}

std::string ExponentMap::describe() const {
  switch (kind_) {
    case Kind::square:
      return "n^2";
    case Kind::affine:
      return std::to_string(slope_) + "n" + (offset_ < 0 ? "" : "+") + std::to_string(offset_);
    case Kind::table: {
      std::string s = "table@" + std::to_string(first_) + ":";
      for (std::size_t i = 0; i < values_.size(); ++i) {
        s += (i ? "," : "") + std::to_string(values_[i]);
      }
      return s;
    }
  }
  return {};
}

void ExponentMap::validate(int lo, int hi) const {
  for (int n = lo; n < hi; ++n) {
    if ((*this)(n + 1) - (*this)(n) < 2) {
      throw PreconditionError("exponent map " + describe() + ": s(" + std::to_string(n + 1) +
                              ") - s(" + std::to_string(n) + ") < 2");
    }
  }
  (*this)(hi);
}

// ---- ForceSpec ----

const char* to_string(Step step) noexcept {
  switch (step) {
    case Step::step1:
      return "step1";
    case Step::step2:
      return "step2";
    case Step::step3:
      return "step3";
  }
  return "unknown";
}

ForceSpec ForceSpec::paper(Step variant, int N, double delta) {
  ForceSpec s;
  s.variant = variant;
  s.N = N;
  s.delta = delta;
  s.exponent = ExponentMap::square();
  s.block_low = 10;
  s.block_high = variant == Step::step3 ? N - 50 : N;
  if (variant == Step::step3) s.carrier = N * N;
  return s;
}

int ForceSpec::carrier_exponent() const { return carrier ? *carrier : exponent(N); }

void ForceSpec::validate(const FrequencyLattice& lat) const {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw PreconditionError("ForceSpec: delta must be positive");
  if (probe_gap < 3) throw PreconditionError("ForceSpec: probe gap must be >= 3");
  if (!(overlap_tolerance > 0.0 && overlap_tolerance < 1.0)) {
    throw PreconditionError("ForceSpec: overlap tolerance must lie in (0, 1)");
  }
  switch (variant) {
    case Step::step1:
      if (N < 1) throw PreconditionError("force_step1: N >= 1 required");
      require_chi_resolved(lat, "force_step1");
      require_overflow(lat, pow2(N) + 2.0, "force_step1");
      carrier_wavenumber(lat, N, "force_step1");
      break;
    case Step::step2: {
      log_factor(N, "force_step2");
      require_range(*this, "force_step2");
      require_chi_resolved(lat, "force_step2");
      if (exponent(block_low) < 1) throw PreconditionError("force_step2: s(n) >= 1 required");
      for (int n = block_low; n < block_high; ++n) {
        if (pow2(exponent(n)) + 2.0 > pow2(exponent(n + 1)) - 2.0) {
          throw PreconditionError("force_step2: annuli of terms " + std::to_string(n) + " and " +
                                  std::to_string(n + 1) + " overlap");
        }
      }
      require_overflow(lat, pow2(exponent(block_high)) + 2.0, "force_step2");
      for (int n = block_low; n <= block_high; ++n) carrier_wavenumber(lat, exponent(n), "force_step2");
      break;
    }
    case Step::step3: {
      log_factor(N, "force_step3");
      require_range(*this, "force_step3");
      const int c = carrier_exponent();
      const int top = exponent(block_high);
      if (c < top + 2) {
        throw PreconditionError("force_step3: carrier exponent " + std::to_string(c) +
                                " must be >= s(block_high) + 2 = " + std::to_string(top + 2));
      }
      require_overflow(lat, pow2(c) + pow2(top + 1), "force_step3");
      carrier_wavenumber(lat, c, "force_step3");
      if (stride && !(*stride > 0.0)) throw PreconditionError("force_step3: stride must be positive");
      break;
    }
  }
}

std::string ForceSpec::to_json() const {
  nlohmann::ordered_json j;
  j["variant"] = to_string(variant);
  j["delta"] = delta;
  j["N"] = N;
  nlohmann::ordered_json desk;
  nlohmann::ordered_json paper_j;
  switch (variant) {
    case Step::step1:
      desk["frequency_exponent"] = N;
      paper_j["frequency_exponent"] = N;
      break;
    case Step::step2:
      desk["exponent_map"] = exponent.describe();
      desk["terms"] = {block_low, block_high};
      paper_j["exponent_map"] = "n^2";
      paper_j["terms"] = {10, N};
      break;
    case Step::step3:
      desk["exponent_map"] = exponent.describe();
      desk["blocks"] = {block_low, block_high};
      desk["carrier_exponent"] = carrier_exponent();
      desk["stride"] = stride ? nlohmann::ordered_json(*stride) : nlohmann::ordered_json(nullptr);
      desk["overlap_tolerance"] = overlap_tolerance;
      paper_j["exponent_map"] = "n^2";
      paper_j["blocks"] = {10, N - 50};
      paper_j["carrier_exponent"] = N * N;
      paper_j["probe_shells"] = {N / 2, N - 100};
      break;
  }
  desk["probe_gap"] = probe_gap;
  paper_j["probe_gap"] = 10;
  j["desk"] = desk;
  j["paper"] = paper_j;
  return j.dump();
}

// ---- builders ----

double chi_hat(double r) noexcept { return lp::radial_cut(r, lp::CutProfile{1.0, 2.0}); }

SpectralField chi_bump(const FrequencyLattice& lat) {
  require_chi_resolved(lat, "chi_bump");
  SpectralField out(lat);
  add_chi(out, 0, 1.0);
  return out;
}

SpectralField force_step1(const FrequencyLattice& lat, int N, double delta) {
  ForceSpec spec;
  spec.variant = Step::step1;
  spec.N = N;
  spec.delta = delta;
  spec.validate(lat);
  SpectralField out(lat);
  add_cosine_pair(out, carrier_wavenumber(lat, N, "force_step1"), delta * pow2(2.5 * N));
  return out;
}

SpectralField force_step2(const FrequencyLattice& lat, const ForceSpec& spec) {
  if (spec.variant != Step::step2) throw PreconditionError("force_step2: spec is not Step 2");
  spec.validate(lat);
  const double scale = spec.delta / std::sqrt(log_factor(spec.N, "force_step2"));
  SpectralField out(lat);
  for (int n = spec.block_low; n <= spec.block_high; ++n) {
    const int s = spec.exponent(n);
    add_cosine_pair(out, carrier_wavenumber(lat, s, "force_step2"),
                    scale * pow2(2.5 * s) / std::sqrt(static_cast<double>(n)));
  }
  return out;
}

SpectralField step3_envelope(const FrequencyLattice& lat, const ForceSpec& spec, double stride) {
  const auto part = block_partition(lat, spec);
  SpectralField out(lat);
  for (int k = spec.block_low; k <= spec.block_high; ++k) {
    const int s = spec.exponent(k);
    add_block(out, part, s, stride * s);
  }
  return out;
}

double calibrate_R(const FrequencyLattice& lat, const ForceSpec& spec) {
  if (spec.variant != Step::step3) throw PreconditionError("calibrate_R: spec is not Step 3");
  spec.validate(lat);
  const double sum = block_sum(lat, spec);
  const double span = spec.exponent(spec.block_high) - spec.exponent(spec.block_low);
  for (double R = lat.grid_step();; R *= 2.0) {
    if (R * span >= lat.box_side()) {
      throw TranslationCollision("calibrate_R: no stride up to " + std::to_string(R) +
                                 " separates the blocks within the box");
    }
    const double ratio = l4_fourth(step3_envelope(lat, spec, R)) / sum;
    if (std::abs(ratio - 1.0) <= spec.overlap_tolerance) return R;
  }
}

Step3Forcing force_step3(const FrequencyLattice& lat, const ForceSpec& spec) {
  if (spec.variant != Step::step3) throw PreconditionError("force_step3: spec is not Step 3");
  spec.validate(lat);
  Step3Forcing out{SpectralField(lat), SpectralField(lat)};
  out.block_l4_sum = block_sum(lat, spec);
  out.stride = spec.stride ? *spec.stride : calibrate_R(lat, spec);
  out.envelope = step3_envelope(lat, spec, out.stride);
  const double fourth = l4_fourth(out.envelope);
  if (std::abs(fourth / out.block_l4_sum - 1.0) > spec.overlap_tolerance) {
    throw TranslationCollision("force_step3: blocks overlap at stride " +
                               std::to_string(out.stride) + " (L4 ratio " +
                               std::to_string(fourth / out.block_l4_sum) + ")");
  }
  out.envelope_l4 = std::sqrt(std::sqrt(fourth));

  const int c = spec.carrier_exponent();
  const int K = carrier_wavenumber(lat, c, "force_step3");
  const double amp = spec.delta * pow2(2.5 * c) /
                     (std::pow(static_cast<double>(spec.N), 0.25) * log_factor(spec.N, "force_step3"));
  const int reach = static_cast<int>(std::ceil(pow2(spec.exponent(spec.block_high) + 1) / lat.spacing()));
  const int kmax = lat.max_wavenumber();
  for (int k1 = -std::min(reach, kmax); k1 <= std::min(reach, kmax); ++k1) {
    for (int k2 = -std::min(reach, kmax); k2 <= std::min(reach, kmax); ++k2) {
      const complex v = out.envelope.at(k1, k2);
      if (v == complex{}) continue;
      out.forcing.at(k1 + K, k2) += 0.5 * amp * v;
      out.forcing.at(k1 - K, k2) += 0.5 * amp * v;
    }
  }
  return out;
}

SpectralField build_forcing(const FrequencyLattice& lat, const ForceSpec& spec) {
  switch (spec.variant) {
    case Step::step1:
      return force_step1(lat, spec.N, spec.delta);
    case Step::step2:
      return force_step2(lat, spec);
    case Step::step3:
      return force_step3(lat, spec).forcing;
  }
  throw PreconditionError("build_forcing: unknown variant");
}

double working_set_bytes(int M) {
  const double mm = static_cast<double>(M) * M;
  // Eight lattice fields plus the three padded grids and two half spectra of
  // one bilinear evaluation.
  return 8.0 * mm * sizeof(complex) + 5.0 * 4.0 * mm * sizeof(double);
}

std::size_t memory_budget() {
  const long pages = sysconf(_SC_PHYS_PAGES);
  const long page = sysconf(_SC_PAGE_SIZE);
  if (pages <= 0 || page <= 0) return std::size_t{8} << 30;
  return static_cast<std::size_t>(pages) * static_cast<std::size_t>(page);
}

FrequencyLattice required_lattice(const ForceSpec& spec, double spacing) {
  if (!(spacing > 0.0)) throw PreconditionError("required_lattice: spacing must be positive");
  double need = 0.0;
  switch (spec.variant) {
    case Step::step1:
      need = pow2(spec.N) + 2.0;
      break;
    case Step::step2:
      need = pow2(spec.exponent(spec.block_high)) + 2.0;
      break;
    case Step::step3:
      need = pow2(spec.carrier_exponent()) + pow2(spec.exponent(spec.block_high) + 1);
      break;
  }
  const double m = std::ceil(2.0 * (need / spacing + 1.0));
  if (m > 1 << 24) {
    throw ResourceLimit("required_lattice: " + std::to_string(m) + " points per axis needed");
  }
  const int M = bits_for(need, spacing);
  const double mm = static_cast<double>(M) * M;
  const double padded = 4.0 * mm * sizeof(double);
  const double limit = static_cast<double>(spectral::buffer_limit());
  const double working = working_set_bytes(M);
  const double budget = static_cast<double>(memory_budget());
  if (padded > limit || working > budget) {
    throw ResourceLimit("required_lattice: M = " + std::to_string(M) + " needs padded buffers of " +
                        std::to_string(padded / gib) + " GiB (limit " + std::to_string(limit / gib) +
                        ") and a working set near " + std::to_string(working / gib) +
                        " GiB (budget " + std::to_string(budget / gib) + ")");
  }
  return FrequencyLattice(M, spacing);
}

}  // namespace sqg::illposed
