#pragma once

#include <array>
#include <cstdint>

#include "leukoseg/image.hpp"

namespace leukoseg {

struct Histogram {
  std::array<std::uint64_t, 256> counts{};

  std::uint64_t total() const noexcept;
  std::uint64_t operator[](int grey) const { return counts[static_cast<std::size_t>(grey)]; }
  bool operator==(const Histogram&) const = default;
};

Histogram histogram(const ChannelImage& img);
// Only pixels where region is set are counted.
Histogram histogram(const ChannelImage& img, const BinaryMask& region);

enum class Polarity { kKeepAbove, kKeepBelow };

// Strict comparison on both sides: pixels equal to t are background.
BinaryMask apply_threshold(const ChannelImage& img, int t, Polarity polarity);

// Rounds half up; used wherever a real-valued grey level becomes integral.
int round_grey(double v);

}  // namespace leukoseg
