#include "leukoseg/swam.hpp"

#include <algorithm>

#include "leukoseg/error.hpp"

namespace leukoseg {

namespace {

struct Selection {
  std::uint64_t count = 0;
  std::uint64_t sum = 0;
};

// Pixels with lo < f < hi.
Selection select_open(const Histogram& h, int lo, int hi) {
  Selection s;
  for (int f = std::max(lo + 1, 0); f < std::min(hi, 256); ++f) {
    s.count += h[f];
    s.sum += h[f] * static_cast<std::uint64_t>(f);
  }
  return s;
}

// Exact rational mean, rounded half up.
int rounded_mean(const Selection& s) {
  return static_cast<int>((2 * s.sum + s.count) / (2 * s.count));
}

std::array<int, 4> ascending_levels(const Histogram& h) {
  int ti = 0;
  int tj = 0;
  std::array<int, 4> levels{};
  for (int round = 0; round < 3; ++round) {
    const Selection above = select_open(h, ti, 256);
    if (above.count == 0) {
      throw DegenerateImageError("stepwise averaging: no pixels above the current level");
    }
    tj = rounded_mean(above);
    const Selection between = select_open(h, ti, tj);
    const int tk = between.count == 0 ? ti : rounded_mean(between);
    levels[static_cast<std::size_t>(round)] = tk;
    ti = tk;
  }
  levels[3] = tj;
  return levels;
}

}  // namespace

std::array<int, 4> SwamLevels::ascending() const {
  std::array<int, 4> v{background, erythrocyte, cytoplasm, nucleus};
  std::sort(v.begin(), v.end());
  return v;
}

SwamLevels swam_levels(const Histogram& hist, LevelOrder order) {
  int occupied = 0;
  for (auto c : hist.counts) occupied += c != 0 ? 1 : 0;
  if (occupied < 2) throw DegenerateImageError("stepwise averaging: constant image");

  Histogram h = hist;
  if (order == LevelOrder::kDescending) {
    for (int f = 0; f < 256; ++f) h.counts[static_cast<std::size_t>(f)] = hist[255 - f];
  }
  const auto l = ascending_levels(h);
  SwamLevels out{l[0], l[1], l[2], l[3], order};
  if (order == LevelOrder::kDescending) {
    out.background = 255 - l[0];
    out.erythrocyte = 255 - l[1];
    out.cytoplasm = 255 - l[2];
    out.nucleus = 255 - l[3];
  }
  return out;
}

SwamLevels swam_levels(const ChannelImage& img, LevelOrder order) {
  return swam_levels(histogram(img), order);
}

int nucleus_threshold(const SwamLevels& levels) {
  return (levels.cytoplasm + levels.nucleus + 1) / 2;
}

BinaryMask nucleus_mask(const ChannelImage& img, const SwamLevels& levels) {
  const int t = nucleus_threshold(levels);
  return apply_threshold(img, t,
                         levels.order == LevelOrder::kAscending ? Polarity::kKeepAbove
                                                                : Polarity::kKeepBelow);
}

}  // namespace leukoseg
