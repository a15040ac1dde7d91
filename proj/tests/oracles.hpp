#pragma once

// Independent reference implementations used only by the tests. They favour
// the most literal reading of each definition over speed.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "leukoseg/image.hpp"

namespace oracle {

using leukoseg::BinaryMask;
using leukoseg::ChannelImage;

inline BinaryMask disc(int w, int h, double cx, double cy, double r) {
  BinaryMask m(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) m.set(x, y);
    }
  }
  return m;
}

inline BinaryMask rect(int w, int h, int x0, int y0, int x1, int y1) {
  BinaryMask m(w, h);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) m.set(x, y);
  }
  return m;
}

inline BinaryMask random_blobs(int w, int h, double density, std::mt19937& rng) {
  std::bernoulli_distribution on(density);
  BinaryMask m(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) m.set(x, y, on(rng));
  }
  return m;
}

// Recursive 8-connected flood fill; returns the number of components.
inline void flood(const BinaryMask& m, std::vector<int>& label, int x, int y, int id) {
  if (!m.contains(x, y) || !m.test(x, y) || label[m.index(x, y)] != 0) return;
  label[m.index(x, y)] = id;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      if (dx != 0 || dy != 0) flood(m, label, x + dx, y + dy, id);
    }
  }
}

inline int count_components(const BinaryMask& m) {
  std::vector<int> label(m.size(), 0);
  int id = 0;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (m.test(x, y) && label[m.index(x, y)] == 0) flood(m, label, x, y, ++id);
    }
  }
  return id;
}

// Stepwise averaging simulated on an explicit list of pixel values with
// integer arithmetic only.
inline std::array<int, 4> swam(const std::vector<int>& pixels) {
  auto mean = [](const std::vector<int>& v) {
    long long s = 0;
    for (int p : v) s += p;
    const auto n = static_cast<long long>(v.size());
    return static_cast<int>((2 * s + n) / (2 * n));
  };
  int ti = 0;
  int tj = 0;
  std::array<int, 4> out{};
  for (int round = 0; round < 3; ++round) {
    std::vector<int> above;
    for (int p : pixels) {
      if (p > ti) above.push_back(p);
    }
    tj = mean(above);
    std::vector<int> between;
    for (int p : pixels) {
      if (p > ti && p < tj) between.push_back(p);
    }
    const int tk = between.empty() ? ti : mean(between);
    out[static_cast<std::size_t>(round)] = tk;
    ti = tk;
  }
  out[3] = tj;
  return out;
}

// Pixel-level divergence of a threshold tuple, straight from the definitions.
inline double divergence(const ChannelImage& img, const std::vector<int>& t, double delta) {
  const auto values = img.data();
  const int fmin = *std::min_element(values.begin(), values.end());
  const int fmax = *std::max_element(values.begin(), values.end());
  const std::size_t classes = t.size() + 1;
  auto region_of = [&](int f) {
    std::size_t c = 0;
    while (c < t.size() && f >= t[c]) ++c;
    return c;
  };
  std::vector<double> sum(classes, 0.0);
  std::vector<double> cnt(classes, 0.0);
  for (int f : values) {
    sum[region_of(f)] += f;
    cnt[region_of(f)] += 1.0;
  }
  std::vector<double> mean(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    const double lo = c == 0 ? 0 : t[c - 1];
    const double hi = c + 1 == classes ? 255 : t[c];
    mean[c] = cnt[c] > 0 ? sum[c] / cnt[c] : (lo + hi) / 2.0;
  }
  double d = 0.0;
  for (int f : values) {
    const double mu = 1.0 / (1.0 + std::abs(f - mean[region_of(f)]) / (fmax - fmin));
    const double lower = std::pow(mu, 1.0 / delta);
    const double upper = std::pow(mu, delta);
    const double m = lower + upper - lower * upper;
    d += 2.0 - (2.0 - m) * std::exp(m - 1.0) - m * std::exp(1.0 - m);
  }
  return d;
}

// Exhaustive arg-min over strictly increasing tuples in [1, 254]; values
// within a relative 1e-9 of the best count as ties and the lexicographically
// smallest tuple wins.
inline std::vector<int> best_thresholds(const ChannelImage& img, int classes, double delta) {
  std::vector<std::vector<int>> tuples;
  if (classes == 2) {
    for (int a = 1; a <= 254; ++a) tuples.push_back({a});
  } else {
    for (int a = 1; a <= 254; ++a) {
      for (int b = a + 1; b <= 254; ++b) tuples.push_back({a, b});
    }
  }
  std::vector<double> d(tuples.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    d[i] = divergence(img, tuples[i], delta);
    best = std::min(best, d[i]);
  }
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    if (d[i] <= best + 1e-9 * std::max(1.0, best)) return tuples[i];
  }
  return {};
}

// Number of inside/outside changes met when walking from a to b in quarter
// pixel steps over a filled region.
inline int crossings(const BinaryMask& region, double ax, double ay, double bx, double by) {
  const double len = std::hypot(bx - ax, by - ay);
  const int steps = std::max(1, static_cast<int>(std::ceil(len / 0.25)));
  auto inside = [&](double x, double y) {
    const int px = static_cast<int>(std::lround(x));
    const int py = static_cast<int>(std::lround(y));
    return region.contains(px, py) && region.test(px, py);
  };
  bool state = inside(ax, ay);
  int n = 0;
  for (int s = 1; s <= steps; ++s) {
    const double t = static_cast<double>(s) / steps;
    const bool in = inside(ax + t * (bx - ax), ay + t * (by - ay));
    if (in != state) {
      ++n;
      state = in;
    }
  }
  return n;
}

}  // namespace oracle
