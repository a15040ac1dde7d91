#pragma once

#include "leukoseg/image.hpp"

namespace leukoseg {

struct HsiChannels {
  ChannelImage hue;         // [0, 360) degrees mapped onto [0, 255]
  ChannelImage saturation;  // [0, 1] mapped onto [0, 255]
  ChannelImage intensity;   // (R + G + B) / 3
};

// Geometric HSI: hue from the arccos formula, S = 1 - 3 min / (R + G + B).
// Hue is 0 wherever saturation is 0.
HsiChannels rgb_to_hsi(const RasterImage& img);

ChannelImage green_channel(const RasterImage& img);

struct HsgWeights {
  double hue = 0.4;
  double saturation = 0.6;
  double green = 1.0;
};

// Raw HSG ratio for one pixel; 255 when the green value is 0, and capped at
// 255 otherwise.
double hsg_raw(int hue, int saturation, int green, const HsgWeights& w);

// (w1 H + w2 S) / (w3 G) per pixel, min-max rescaled to [0, 255]. A constant
// raw image maps to all zeros.
ChannelImage hsg_transform(const ChannelImage& hue, const ChannelImage& saturation,
                           const ChannelImage& green, const HsgWeights& w = {});

}  // namespace leukoseg
