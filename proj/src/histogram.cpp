#include "leukoseg/histogram.hpp"

#include <cmath>
#include <numeric>

namespace leukoseg {

std::uint64_t Histogram::total() const noexcept {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

Histogram histogram(const ChannelImage& img) {
  Histogram h;
  for (auto v : img.data()) ++h.counts[v];
  return h;
}

Histogram histogram(const ChannelImage& img, const BinaryMask& region) {
  require_same_shape(img, region, "histogram");
  Histogram h;
  auto values = img.data();
  auto sel = region.data();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (sel[i] != 0) ++h.counts[values[i]];
  }
  return h;
}

BinaryMask apply_threshold(const ChannelImage& img, int t, Polarity polarity) {
  BinaryMask out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const int v = img.at(x, y);
      out.set(x, y, polarity == Polarity::kKeepAbove ? v > t : v < t);
    }
  }
  return out;
}

int round_grey(double v) { return static_cast<int>(std::floor(v + 0.5)); }

}  // namespace leukoseg
