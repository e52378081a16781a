#pragma once

#include "sqg/field.hpp"
#include "sqg/lp/partition.hpp"

namespace sqg::lp {

struct BonySplit {
  SpectralField low_high;   // sum over k <= l - 3 of B[f_k, g_l]
  SpectralField high_low;   // sum over k >= l + 3
  SpectralField high_high;  // sum over |k - l| <= 2
};

// Paraproduct decomposition of B[f, g] over the partition window, each piece
// evaluated with bee_block on grouped shells.
BonySplit bony_split(const SpectralField& f, const SpectralField& g,
                     const DyadicPartition& partition);
BonySplit bony_split(const SpectralField& f, const SpectralField& g);

}  // namespace sqg::lp
