#pragma once

#include <array>

#include "leukoseg/histogram.hpp"
#include "leukoseg/image.hpp"

namespace leukoseg {

// Whether the nucleus is the brightest (ascending) or darkest (descending)
// class of a channel.
enum class LevelOrder { kAscending, kDescending };

// Characteristic grey levels of the four smear classes in one channel.
struct SwamLevels {
  int background = 0;
  int erythrocyte = 0;
  int cytoplasm = 0;
  int nucleus = 0;
  LevelOrder order = LevelOrder::kAscending;

  // The four levels sorted by grey value.
  std::array<int, 4> ascending() const;
  bool operator==(const SwamLevels&) const = default;
};

// Stepwise averaging. Starting from T_i = 0, three rounds of
//   T_j = mean of pixels > T_i,  T_k = mean of pixels in (T_i, T_j),  T_i = T_k
// give background, erythrocyte and cytoplasm as the successive T_k and the
// nucleus as the final T_j. Descending channels are inverted first and the
// levels mapped back. Throws DegenerateImageError for constant images or when
// nothing lies above T_i.
SwamLevels swam_levels(const Histogram& hist, LevelOrder order = LevelOrder::kAscending);
SwamLevels swam_levels(const ChannelImage& img, LevelOrder order = LevelOrder::kAscending);

// round((T_c + T_n) / 2)
int nucleus_threshold(const SwamLevels& levels);
// Raw nucleus mask: keep-above the nucleus threshold for ascending levels,
// keep-below for descending ones.
BinaryMask nucleus_mask(const ChannelImage& img, const SwamLevels& levels);

}  // namespace leukoseg
