#pragma once

#include <iosfwd>
#include <string>

#include "sqg/field.hpp"

namespace sqg::spectral {

// Text snapshot of a field. Layout (one item per line):
//
//   sqglab-field 1
//   M <points per axis>
//   h <frequency spacing, 17 significant digits>
//   rank <1 | 2 | 4>
//   real <0 | 1>
//   order centered-row-major
//   <k1> <k2> <re c0> <im c0> [<re c1> <im c1> ...]
//
// Data lines run over k1 = -M/2 .. M/2-1 (slow) and k2 = -M/2 .. M/2-1 (fast),
// one line per lattice point, components in storage order.
void write_snapshot(std::ostream& out, const SpectralField& f);
void write_snapshot(const std::string& path, const SpectralField& f);

SpectralField read_snapshot(std::istream& in);
SpectralField read_snapshot(const std::string& path);

}  // namespace sqg::spectral
