#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "sqg/bilinear/bilinear.hpp"
#include "sqg/error.hpp"
#include "sqg/lp/besov.hpp"
#include "sqg/lp/bony.hpp"
#include "sqg/lp/partition.hpp"
#include "sqg/lp/probe.hpp"
#include "sqg/spectral/operators.hpp"

using namespace sqg;
using namespace sqg::lp;
using oracle::add_cos;

namespace {

// Field supported on the plateau of shell j: 7/8 2^j <= |xi| <= 5/4 2^j.
SpectralField plateau_field(const FrequencyLattice& lat, int j, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_field(lat, 0.875 * std::ldexp(1.0, j), 1.25 * std::ldexp(1.0, j), rng);
}

}  // namespace

TEST_CASE("profile primitives") {
  CHECK(smooth_step(0.0) == 0.0);
  CHECK(smooth_step(1.0) == 1.0);
  CHECK(smooth_step(0.5) == doctest::Approx(0.5));
  CHECK(radial_cut(1.25, {}) == 1.0);
  CHECK(radial_cut(1.75, {}) == 0.0);
  CHECK_THROWS_AS(validate_profile({1.0, 1.75}), PreconditionError);
  CHECK_THROWS_AS(validate_profile({1.25, 1.9}), PreconditionError);
  CHECK_THROWS_AS(validate_profile({1.5, 1.5}), PreconditionError);
  CHECK_NOTHROW(validate_profile({1.3, 1.6}));
}

TEST_CASE("partition spec examples") {
  FrequencyLattice lat(64, 0.125);
  const auto part = build_partition(lat);
  CHECK(part.phi(0, 1.0) == 1.0);
  CHECK(part.phi(0, 0.625) == 0.0);
  CHECK(part.phi(-1, 0.625) == 1.0);
  CHECK(part.phi(0, 0.45) == 0.0);
  CHECK(part.phi(0, 2.1) == 0.0);
  CHECK(part.j_min() == -3);
  CHECK(part.j_max() == 3);
  CHECK_THROWS_AS(build_partition(lat, 2, 1), PreconditionError);
}

TEST_CASE("partition invariants on the lattice") {
  for (double h : {0.125, 0.3, 1.0}) {
    FrequencyLattice lat(64, h);
    const auto part = build_partition(lat);
    const int kmax = lat.max_wavenumber();
    double unity = 0.0;
    bool support_ok = true, plateau_ok = true, range_ok = true;
    for (int k1 = -kmax; k1 <= kmax; ++k1)
      for (int k2 = -kmax; k2 <= kmax; ++k2) {
        if (k1 == 0 && k2 == 0) continue;
        const double r = lat.modulus(k1, k2);
        double sum = 0.0;
        for (int j = part.j_min(); j <= part.j_max(); ++j) {
          const double v = part.phi(j, r);
          sum += v;
          const double t = std::ldexp(r, -j);
          if (v < 0.0 || v > 1.0) range_ok = false;
          if ((t < 0.5 || t > 2.0) && v != 0.0) support_ok = false;
          if (t >= 0.875 && t <= 1.25 && v != 1.0) plateau_ok = false;
        }
        unity = std::max(unity, std::abs(sum - 1.0));
      }
    CHECK(unity < 1e-12);
    CHECK(support_ok);
    CHECK(plateau_ok);
    CHECK(range_ok);
  }
}

TEST_CASE("shell_project") {
  FrequencyLattice lat(64, 0.25);
  const auto part = build_partition(lat);
  SpectralField f(lat);
  add_cos(f, 4, 0, 1.0);
  CHECK(oracle::max_diff(shell_project(f, part, 0), f) == 0.0);
  CHECK(shell_project(f, part, 2).is_zero());

  SpectralField two(lat), low(lat), high(lat);
  add_cos(two, 4, 0, 1.0);
  add_cos(two, 16, 0, 1.0);
  add_cos(low, 4, 0, 1.0);
  add_cos(high, 16, 0, 1.0);
  CHECK(oracle::max_diff(shell_project(two, part, 0), low) == 0.0);
  CHECK(oracle::max_diff(shell_project(two, part, 2), high) == 0.0);

  auto r = oracle::random_full(lat, 1);
  SpectralField sum(lat);
  for (int j = part.j_min(); j <= part.j_max(); ++j) sum += shell_project(r, part, j);
  CHECK(relative_distance(sum, r) < 1e-12);

  auto once = shell_project(r, part, 0);
  CHECK(shell_project(once, part, 2).is_zero());
  CHECK(shell_project(once, part, -2).is_zero());
}

TEST_CASE("Besov spec examples") {
  FrequencyLattice lat(64, 0.25);
  SpectralField f(lat);
  add_cos(f, 4, 0, 2.0);
  for (double s : {-1.0, 0.0, 0.5})
    for (double q : {1.0, 2.0, infinity})
      CHECK(besov_norm(f, BesovIndex(s, infinity, q)) == doctest::Approx(2.0).epsilon(1e-14));

  for (int m : {-1, 1, 2}) {
    SpectralField g(lat);
    add_cos(g, 4 << (m + 1) >> 1, 0, 2.0);
    const double s = -0.5;
    CHECK(besov_norm(g, BesovIndex(s, infinity, 2.0)) ==
          doctest::Approx(std::pow(2.0, s * m + 1)).epsilon(1e-13));
  }

  SpectralField two(lat);
  add_cos(two, 4, 0, 1.0);
  add_cos(two, 8, 0, 1.0);
  CHECK(besov_norm(two, BesovIndex(0.0, infinity, 1.0)) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(besov_norm(two, BesovIndex(0.0, infinity, 2.0)) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("Besov index constructors") {
  const auto d = BesovIndex::data(4.0, 2.0);
  CHECK(d.s == -2.5);
  CHECK(d.is_data_critical());
  const auto s = BesovIndex::solution(infinity, infinity);
  CHECK(s.s == -1.0);
  CHECK(s.is_solution_critical());
  CHECK_THROWS_AS(BesovIndex(0.0, 0.5, 2.0), PreconditionError);
  CHECK_THROWS_AS(BesovIndex(0.0, 2.0, 0.9), PreconditionError);
}

TEST_CASE("L^p quadrature") {
  FrequencyLattice lat(32, 0.5);
  SpectralField f(lat);
  add_cos(f, 2, 0, 3.0);
  const double area = lat.box_side() * lat.box_side();
  CHECK(lp_norm(f, 2.0) == doctest::Approx(3.0 * std::sqrt(area / 2.0)).epsilon(1e-14));
  CHECK(lp_norm(f, 4.0) == doctest::Approx(3.0 * std::pow(3.0 * area / 8.0, 0.25)).epsilon(1e-14));
  CHECK(lp_norm(f, infinity) == doctest::Approx(3.0).epsilon(1e-15));
  const double huge[] = {1e300, 1e300};
  CHECK(std::isfinite(lp_norm(std::span<const double>(huge), 1.0, 4.0)));
}

TEST_CASE("single-shell exactness and profile consistency") {
  FrequencyLattice lat(64, 0.25);
  const auto f = plateau_field(lat, 1, 3);
  for (double p : {2.0, 4.0, 8.0, infinity}) {
    const double s = -0.3;
    const double expect = std::pow(2.0, s) * lp_norm(f, p);
    CHECK(besov_norm(f, BesovIndex(s, p, 2.0)) == doctest::Approx(expect).epsilon(1e-13));
  }
  const auto r = oracle::random_full(lat, 4);
  const auto profile = shell_profile(r, -0.5, 4.0);
  for (double q : {1.0, 2.0, infinity})
    CHECK(aggregate_lq(profile, q) ==
          doctest::Approx(besov_norm(r, BesovIndex(-0.5, 4.0, q))).epsilon(1e-12));
  const auto single = shell_profile(f, -0.5, 4.0);
  int nonzero = 0;
  for (const auto& e : single.entries) nonzero += e.value > 0.0;
  CHECK(nonzero == 1);
}

TEST_CASE("aggregate_lq") {
  const double vals[] = {1.0, 1.0, 1.0, 1.0};
  CHECK(aggregate_lq(vals, 1.0) / aggregate_lq(vals, 2.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(aggregate_lq(vals, infinity) == 1.0);
  const double graded[] = {1e-200, 1e200, 1.0};
  CHECK(aggregate_lq(graded, 2.0) == doctest::Approx(1e200));
}

TEST_CASE("dyadic covariance at critical indices") {
  FrequencyLattice lat(64, 0.25);
  const auto th = plateau_field(lat, 1, 5);
  for (double p : {2.0, 4.0, 8.0}) {
    const auto sol = BesovIndex::solution(p, 2.0);
    const auto dat = BesovIndex::data(p, 2.0);
    const double base = besov_norm(th, sol);
    const double base_d = besov_norm(th, dat);
    for (int m = -2; m <= 2; ++m) {
      const auto r = spectral::dyadic_rescale(th, m);
      const auto rf = spectral::dyadic_rescale(th, m, spectral::RescaleVariant::forcing);
      CHECK(besov_norm(r, sol) == doctest::Approx(base).epsilon(1e-8));
      CHECK(besov_norm(rf, dat) == doctest::Approx(base_d).epsilon(1e-8));
    }
  }
}

TEST_CASE("out-of-window energy is reported") {
  FrequencyLattice lat(64, 0.25);
  SpectralField f(lat);
  add_cos(f, 4, 0, 1.0);
  add_cos(f, 20, 0, 1.0);
  const auto narrow = build_partition(lat, -1, 1);
  int warnings = 0;
  auto old = set_warning_sink([&](std::string_view) { ++warnings; });
  const auto profile = shell_profile(f, narrow, 0.0, 2.0);
  set_warning_sink(old);
  CHECK(profile.out_of_window_fraction == doctest::Approx(0.5));
  CHECK(warnings == 1);
}

TEST_CASE("profile CSV and partition dump") {
  FrequencyLattice lat(32, 0.25);
  SpectralField f(lat);
  std::ostringstream out;
  write_profile_csv(out, shell_profile(f, 0.0, 2.0));
  CHECK(out.str() == "j,shell_value\n");
  std::ostringstream dump;
  write_partition_dump(dump, build_partition(lat), {0, 1}, 5);
  CHECK(dump.str().rfind("r,phi_0,phi_1,window_sum\n", 0) == 0);
}

TEST_CASE("probe functions") {
  FrequencyLattice lat(256, 0.125);
  const auto part = build_partition(lat);
  for (int j : {1, 2, 3}) {
    const auto probe = build_probe(lat, j);
    const auto c = probe.center();
    CHECK(probe.closed_form(c[0], c[1]) == 1.0);
    CHECK(probe.definitional(c[0], c[1]) == 1.0);
    const int kmax = lat.max_wavenumber();
    double agree = 0.0, reproduce = 0.0;
    bool support_ok = true;
    for (int k1 = -kmax; k1 <= kmax; ++k1)
      for (int k2 = -kmax; k2 <= kmax; ++k2) {
        const double x1 = 0.125 * k1, x2 = 0.125 * k2;
        const double v = probe.closed_form(x1, x2);
        agree = std::max(agree, std::abs(v - probe.definitional(x1, x2)));
        reproduce = std::max(reproduce, std::abs(v - part.phi(j, std::hypot(x1, x2)) * v));
        if (std::hypot(x1 - c[0], x2 - c[1]) > probe.radius() && v != 0.0) support_ok = false;
      }
    CHECK(agree < 1e-12);
    CHECK(reproduce < 1e-12);
    CHECK(support_ok);
  }
  CHECK_THROWS_AS(build_probe(lat, 0, 2), PreconditionError);
  CHECK_THROWS_AS(build_probe(lat, -3, 3), EmptySupport);
  CHECK_THROWS_AS(build_probe(lat, 5, 3), SpectrumOverflow);
  CHECK(lowest_probe_shell(lat) == 0);
  CHECK_NOTHROW(build_probe(lat, lowest_probe_shell(lat)));
}

TEST_CASE("probe projection") {
  FrequencyLattice lat(128, 0.125);
  const auto f = oracle::random_full(lat, 6);
  const auto probe = build_probe(lat, 2);
  const auto pf = probe_project(f, probe);
  CHECK(!pf.real_valued());
  CHECK(lp_norm(pf, 4.0) > 0.0);
  CHECK(lp_norm(pf, 4.0) <= lp_norm(lp::shell_project(f, build_partition(lat), 2), infinity) *
                                std::pow(lat.box_side(), 0.5));
}

TEST_CASE("Bony split") {
  FrequencyLattice lat(128, 1.0);
  SpectralField f(lat);
  add_cos(f, 1, 0, 1.0);
  add_cos(f, 0, 1, -0.5);
  std::mt19937_64 rng(7);
  const auto g = random_field(lat, 28.0, 40.0, rng);
  const auto split = bony_split(f, g);
  CHECK(split.high_low.max_abs() == 0.0);
  CHECK(split.high_high.max_abs() == 0.0);
  CHECK(relative_distance(split.low_high, bilinear::bee(f, g)) < 1e-10);

  FrequencyLattice small(32, 0.5);
  std::mt19937_64 rng2(8);
  const auto a = random_field(small, 1.8, 2.2, rng2);
  const auto b = random_field(small, 1.8, 2.2, rng2);
  const auto same = bony_split(a, b);
  CHECK(same.low_high.max_abs() == 0.0);
  CHECK(same.high_low.max_abs() == 0.0);

  const auto x = oracle::random_full(small, 9);
  const auto y = oracle::random_full(small, 10);
  const auto parts = bony_split(x, y);
  const auto total = parts.low_high + parts.high_low + parts.high_high;
  CHECK(relative_distance(total, bilinear::bee(x, y)) < 1e-10);
}
