#include "leukoseg/color.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "leukoseg/histogram.hpp"

namespace leukoseg {

namespace {

struct Hsi {
  double hue_deg;
  double saturation;
  double intensity;
};

Hsi to_hsi(Rgb px) {
  const double r = px.r;
  const double g = px.g;
  const double b = px.b;
  const double sum = r + g + b;
  const double intensity = sum / 3.0;
  if (sum <= 0.0) return {0.0, 0.0, 0.0};

  const double saturation = 1.0 - 3.0 * std::min({r, g, b}) / sum;
  const double num = 0.5 * ((r - g) + (r - b));
  const double den = std::sqrt((r - g) * (r - g) + (r - b) * (g - b));
  if (den <= 0.0 || saturation <= 0.0) return {0.0, 0.0, intensity};

  const double theta = std::acos(std::clamp(num / den, -1.0, 1.0)) * 180.0 / std::numbers::pi;
  const double hue = (b <= g) ? theta : 360.0 - theta;
  return {hue, saturation, intensity};
}

}  // namespace

HsiChannels rgb_to_hsi(const RasterImage& img) {
  HsiChannels out{ChannelImage(img.width(), img.height()),
                  ChannelImage(img.width(), img.height()),
                  ChannelImage(img.width(), img.height())};
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const Hsi v = to_hsi(img.at(x, y));
      out.hue.at(x, y) = static_cast<std::uint8_t>(std::min(255, round_grey(v.hue_deg * 255.0 / 360.0)));
      out.saturation.at(x, y) = static_cast<std::uint8_t>(round_grey(v.saturation * 255.0));
      out.intensity.at(x, y) = static_cast<std::uint8_t>(round_grey(v.intensity));
    }
  }
  return out;
}

ChannelImage green_channel(const RasterImage& img) {
  ChannelImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) out.at(x, y) = img.at(x, y).g;
  }
  return out;
}

double hsg_raw(int hue, int saturation, int green, const HsgWeights& w) {
  if (green <= 0) return 255.0;
  const double raw = (w.hue * hue + w.saturation * saturation) / (w.green * green);
  return std::min(raw, 255.0);
}

ChannelImage hsg_transform(const ChannelImage& hue, const ChannelImage& saturation,
                           const ChannelImage& green, const HsgWeights& w) {
  require_same_shape(hue, saturation, "hsg_transform");
  require_same_shape(hue, green, "hsg_transform");

  std::vector<double> raw(hue.size());
  auto h = hue.data();
  auto s = saturation.data();
  auto g = green.data();
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = hsg_raw(h[i], s[i], g[i], w);

  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  const double min = *lo;
  const double range = *hi - *lo;

  ChannelImage out(hue.width(), hue.height());
  auto dst = out.values();
  if (range <= 0.0) return out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    dst[i] = static_cast<std::uint8_t>(std::clamp(round_grey((raw[i] - min) / range * 255.0), 0, 255));
  }
  return out;
}

}  // namespace leukoseg
