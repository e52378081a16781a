#include "sqg/lp/bony.hpp"

#include <vector>

#include "sqg/bilinear/bilinear.hpp"
#include "sqg/error.hpp"

namespace sqg::lp {

BonySplit bony_split(const SpectralField& f, const SpectralField& g,
                     const DyadicPartition& partition) {
  require_same_lattice(f.lattice(), g.lattice(), "bony_split");
  require_same_lattice(f.lattice(), partition.lattice(), "bony_split");
  const auto& lat = f.lattice();
  const int lo = partition.j_min();
  const int count = partition.j_max() - lo + 1;

  std::vector<SpectralField> fs, gs;
  std::vector<bool> f_on, g_on;
  for (int j = lo; j <= partition.j_max(); ++j) {
    fs.push_back(shell_project(f, partition, j));
    gs.push_back(shell_project(g, partition, j));
    f_on.push_back(!fs.back().is_zero());
    g_on.push_back(!gs.back().is_zero());
  }

  BonySplit split{SpectralField(lat), SpectralField(lat), SpectralField(lat)};
  // Grouping by the high index keeps the number of bilinear evaluations linear
  // in the shell count.
  for (int l = 0; l < count; ++l) {
    SpectralField f_low(lat), g_low(lat), f_near(lat);
    bool any_f_low = false, any_g_low = false, any_f_near = false;
    for (int k = 0; k < count; ++k) {
      if (k <= l - 3) {
        if (f_on[k]) { f_low += fs[k]; any_f_low = true; }
        if (g_on[k]) { g_low += gs[k]; any_g_low = true; }
      } else if (k - l <= 2 && l - k <= 2 && f_on[k]) {
        f_near += fs[k];
        any_f_near = true;
      }
    }
    if (g_on[l] && any_f_low) split.low_high += bilinear::bee_block(f_low, gs[l]);
    if (f_on[l] && any_g_low) split.high_low += bilinear::bee_block(fs[l], g_low);
    if (g_on[l] && any_f_near) split.high_high += bilinear::bee_block(f_near, gs[l]);
  }
  return split;
}

BonySplit bony_split(const SpectralField& f, const SpectralField& g) {
  return bony_split(f, g, build_partition(f.lattice()));
}

}  // namespace sqg::lp
