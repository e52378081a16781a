#include "sqg/spectral/snapshot.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "sqg/error.hpp"

namespace sqg::spectral {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
T expect(std::istream& in, const char* key) {
  std::string word;
  T value{};
  if (!(in >> word) || word != key || !(in >> value)) {
    throw Error(std::string("snapshot: expected '") + key + "' entry");
  }
  return value;
}

}  // namespace

void write_snapshot(std::ostream& out, const SpectralField& f) {
  const auto& lat = f.lattice();
  const int half = lat.size() / 2;
  out << "sqglab-field 1\n"
      << "M " << lat.size() << '\n'
      << "h " << fmt(lat.spacing()) << '\n'
      << "rank " << f.components() << '\n'
      << "real " << (f.real_valued() ? 1 : 0) << '\n'
      << "order centered-row-major\n";
  for (int k1 = -half; k1 < half; ++k1) {
    for (int k2 = -half; k2 < half; ++k2) {
      out << k1 << ' ' << k2;
      for (int c = 0; c < f.components(); ++c) {
        const complex v = f.at(c, k1, k2);
        out << ' ' << fmt(v.real()) << ' ' << fmt(v.imag());
      }
      out << '\n';
    }
  }
  if (!out) throw Error("snapshot: write failed");
}

void write_snapshot(const std::string& path, const SpectralField& f) {
  std::ofstream out(path);
  if (!out) throw Error("snapshot: cannot open '" + path + "' for writing");
  write_snapshot(out, f);
}

SpectralField read_snapshot(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "sqglab-field" || version != 1) {
    throw Error("snapshot: not a version 1 sqglab field");
  }
  const int m = expect<int>(in, "M");
  const double h = expect<double>(in, "h");
  const int rank = expect<int>(in, "rank");
  const int real = expect<int>(in, "real");
  const auto order = expect<std::string>(in, "order");
  if (order != "centered-row-major") throw Error("snapshot: unknown order '" + order + "'");
  if (rank != 1 && rank != 2 && rank != 4) throw Error("snapshot: invalid rank");

  SpectralField f(FrequencyLattice(m, h), static_cast<Rank>(rank), real != 0);
  const int half = m / 2;
  for (int k1 = -half; k1 < half; ++k1) {
    for (int k2 = -half; k2 < half; ++k2) {
      int r1 = 0, r2 = 0;
      if (!(in >> r1 >> r2) || r1 != k1 || r2 != k2) {
        throw Error("snapshot: data line out of order at k = (" + std::to_string(k1) + ", " +
                    std::to_string(k2) + ")");
      }
      for (int c = 0; c < rank; ++c) {
        double re = 0.0, im = 0.0;
        if (!(in >> re >> im)) throw Error("snapshot: truncated data");
        if (k1 != -half && k2 != -half) f.at(c, k1, k2) = {re, im};
      }
    }
  }
  return f;
}

SpectralField read_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("snapshot: cannot open '" + path + "'");
  return read_snapshot(in);
}

}  // namespace sqg::spectral
