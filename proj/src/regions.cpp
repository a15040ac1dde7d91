#include "leukoseg/regions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace leukoseg {

namespace {

// Clockwise as displayed, starting east.
constexpr std::array<Point, 8> kRing = {{{1, 0}, {1, 1}, {0, 1}, {-1, 1},
                                         {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};
constexpr int kWest = 4;

int ring_index(Point d) {
  for (int i = 0; i < 8; ++i) {
    if (kRing[i] == d) return i;
  }
  return -1;
}

Roi bounds_of(std::span<const Point> pixels) {
  Roi r{pixels.front(), pixels.front()};
  for (const Point& p : pixels) {
    r.top_left.x = std::min(r.top_left.x, p.x);
    r.top_left.y = std::min(r.top_left.y, p.y);
    r.bottom_right.x = std::max(r.bottom_right.x, p.x);
    r.bottom_right.y = std::max(r.bottom_right.y, p.y);
  }
  return r;
}

// Labels 8-connected foreground; label 0 is background. Returns the label
// image and the number of labels.
std::vector<int> label_foreground(const BinaryMask& mask, int& n_labels) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<int> labels(mask.size(), 0);
  std::vector<Point> stack;
  n_labels = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.test(x, y) || labels[mask.index(x, y)] != 0) continue;
      ++n_labels;
      labels[mask.index(x, y)] = n_labels;
      stack.push_back({x, y});
      while (!stack.empty()) {
        const Point p = stack.back();
        stack.pop_back();
        for (const Point d : kRing) {
          const int nx = p.x + d.x;
          const int ny = p.y + d.y;
          if (!mask.contains(nx, ny) || !mask.test(nx, ny)) continue;
          int& l = labels[mask.index(nx, ny)];
          if (l == 0) {
            l = n_labels;
            stack.push_back({nx, ny});
          }
        }
      }
    }
  }
  return labels;
}

}  // namespace

double Contour::length() const noexcept {
  if (points.size() < 2) return 0.0;
  double len = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point a = points[i];
    const Point b = points[(i + 1) % points.size()];
    len += (a.x != b.x && a.y != b.y) ? std::numbers::sqrt2 : 1.0;
  }
  return len;
}

Roi bounding_union(const Roi& a, const Roi& b) {
  return {{std::min(a.top_left.x, b.top_left.x), std::min(a.top_left.y, b.top_left.y)},
          {std::max(a.bottom_right.x, b.bottom_right.x),
           std::max(a.bottom_right.y, b.bottom_right.y)}};
}

std::optional<Roi> intersection(const Roi& a, const Roi& b) {
  Roi r{{std::max(a.top_left.x, b.top_left.x), std::max(a.top_left.y, b.top_left.y)},
        {std::min(a.bottom_right.x, b.bottom_right.x),
         std::min(a.bottom_right.y, b.bottom_right.y)}};
  if (r.top_left.x > r.bottom_right.x || r.top_left.y > r.bottom_right.y) return std::nullopt;
  return r;
}

Roi clamp_to(const Roi& r, int width, int height) {
  auto cx = [&](int v) { return std::clamp(v, 0, width - 1); };
  auto cy = [&](int v) { return std::clamp(v, 0, height - 1); };
  return {{cx(r.top_left.x), cy(r.top_left.y)}, {cx(r.bottom_right.x), cy(r.bottom_right.y)}};
}

std::vector<Component> connected_components(const BinaryMask& mask) {
  int n = 0;
  const std::vector<int> labels = label_foreground(mask, n);
  std::vector<Component> out(static_cast<std::size_t>(n));
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      const int l = labels[mask.index(x, y)];
      if (l != 0) out[static_cast<std::size_t>(l - 1)].pixels.push_back({x, y});
    }
  }
  for (Component& c : out) {
    c.bounds = bounds_of(c.pixels);
    c.stats = shape_stats(c);
  }
  return out;
}

Contour trace_contour(const Component& component) { return trace_contour(component.pixels); }

Contour trace_contour(std::span<const Point> pixels) {
  if (pixels.empty()) throw std::invalid_argument("trace_contour: empty component");

  // Work on a padded local grid so neighbouring components cannot interfere.
  const Roi b = bounds_of(pixels);
  const int w = b.width() + 2;
  const int h = b.height() + 2;
  std::vector<std::uint8_t> grid(static_cast<std::size_t>(w) * h, 0);
  auto at = [&](Point p) -> bool {
    return p.x >= 0 && p.y >= 0 && p.x < w && p.y < h &&
           grid[static_cast<std::size_t>(p.y) * w + p.x] != 0;
  };
  for (const Point& p : pixels) {
    grid[static_cast<std::size_t>(p.y - b.top_left.y + 1) * w + (p.x - b.top_left.x + 1)] = 1;
  }

  Point start{-1, -1};
  for (int y = 0; y < h && start.x < 0; ++y) {
    for (int x = 0; x < w; ++x) {
      if (grid[static_cast<std::size_t>(y) * w + x] != 0) {
        start = {x, y};
        break;
      }
    }
  }

  // Moore-neighbour tracing: scan clockwise from the backtrack neighbour.
  auto next = [&](Point cur, int back, Point& found, int& dir) {
    for (int k = 0; k < 8; ++k) {
      const int d = (back + k) % 8;
      const Point q{cur.x + kRing[d].x, cur.y + kRing[d].y};
      if (at(q)) {
        found = q;
        dir = d;
        return true;
      }
    }
    return false;
  };

  std::vector<Point> pts{start};
  Point first_next;
  int dir = 0;
  if (next(start, kWest, first_next, dir)) {
    Point cur = start;
    Point q = first_next;
    for (;;) {
      const Point prev_cell{cur.x + kRing[(dir + 7) % 8].x, cur.y + kRing[(dir + 7) % 8].y};
      const int back = ring_index({prev_cell.x - q.x, prev_cell.y - q.y});
      cur = q;
      next(cur, back, q, dir);
      if (cur == start && q == first_next) break;
      pts.push_back(cur);
    }
  }

  // The trace runs clockwise on screen; reverse it keeping the start first.
  std::reverse(pts.begin() + 1, pts.end());
  Contour c;
  c.points.reserve(pts.size());
  for (const Point& p : pts) {
    c.points.push_back({p.x - 1 + b.top_left.x, p.y - 1 + b.top_left.y});
  }
  return c;
}

double circularity(double area, double perimeter) {
  if (area <= 0.0) return 0.0;
  if (perimeter <= 0.0) return 1.0;
  return std::min(1.0, 4.0 * std::numbers::pi * area / (perimeter * perimeter));
}

ShapeStats shape_stats(const Component& component) {
  if (component.pixels.empty()) throw std::invalid_argument("shape_stats: empty component");
  ShapeStats s;
  double sx = 0.0;
  double sy = 0.0;
  for (const Point& p : component.pixels) {
    sx += p.x;
    sy += p.y;
  }
  s.area = static_cast<double>(component.pixels.size());
  s.centroid = {sx / s.area, sy / s.area};
  s.perimeter = trace_contour(component).length();
  s.circularity = circularity(s.area, s.perimeter);
  return s;
}

ShapeStats combined_stats(std::span<const Component> components) {
  ShapeStats s;
  double sx = 0.0;
  double sy = 0.0;
  for (const Component& c : components) {
    s.area += c.stats.area;
    s.perimeter += c.stats.perimeter;
    sx += c.stats.centroid.x * c.stats.area;
    sy += c.stats.centroid.y * c.stats.area;
  }
  if (s.area > 0.0) s.centroid = {sx / s.area, sy / s.area};
  s.circularity = circularity(s.area, s.perimeter);
  return s;
}

BinaryMask component_mask(std::span<const Point> pixels, int width, int height) {
  BinaryMask m(width, height);
  for (const Point& p : pixels) m.set(p);
  return m;
}

namespace {

template <bool Erode>
BinaryMask cross_op(const BinaryMask& mask) {
  constexpr std::array<Point, 5> kCross = {{{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
  BinaryMask out(mask.width(), mask.height());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      bool v = Erode;
      for (const Point d : kCross) {
        const int nx = x + d.x;
        const int ny = y + d.y;
        if (!mask.contains(nx, ny)) continue;
        if constexpr (Erode) {
          v = v && mask.test(nx, ny);
        } else {
          v = v || mask.test(nx, ny);
        }
      }
      out.set(x, y, v);
    }
  }
  return out;
}

}  // namespace

BinaryMask erode_cross(const BinaryMask& mask) { return cross_op<true>(mask); }
BinaryMask dilate_cross(const BinaryMask& mask) { return cross_op<false>(mask); }
BinaryMask open_cross(const BinaryMask& mask) { return dilate_cross(erode_cross(mask)); }

BinaryMask fill_holes(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  // Flood the background from the border with 4-connectivity.
  std::vector<std::uint8_t> outside(mask.size(), 0);
  std::vector<Point> stack;
  auto seed = [&](int x, int y) {
    if (!mask.test(x, y) && outside[mask.index(x, y)] == 0) {
      outside[mask.index(x, y)] = 1;
      stack.push_back({x, y});
    }
  };
  for (int x = 0; x < w; ++x) {
    seed(x, 0);
    seed(x, h - 1);
  }
  for (int y = 0; y < h; ++y) {
    seed(0, y);
    seed(w - 1, y);
  }
  constexpr std::array<Point, 4> kFour = {{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
  while (!stack.empty()) {
    const Point p = stack.back();
    stack.pop_back();
    for (const Point d : kFour) {
      const int nx = p.x + d.x;
      const int ny = p.y + d.y;
      if (mask.contains(nx, ny)) seed(nx, ny);
    }
  }
  BinaryMask out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) out.set(x, y, outside[mask.index(x, y)] == 0);
  }
  return out;
}

BinaryMask remove_small_components(const BinaryMask& mask, std::size_t min_area) {
  BinaryMask out(mask.width(), mask.height());
  for (const Component& c : connected_components(mask)) {
    if (c.pixels.size() < min_area) continue;
    for (const Point& p : c.pixels) out.set(p);
  }
  return out;
}

BinaryMask largest_component(const BinaryMask& mask) {
  int n = 0;
  const std::vector<int> labels = label_foreground(mask, n);
  BinaryMask out(mask.width(), mask.height());
  if (n == 0) return out;
  std::vector<std::size_t> sizes(static_cast<std::size_t>(n) + 1, 0);
  for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
  int best = 1;
  for (int l = 2; l <= n; ++l) {
    if (sizes[static_cast<std::size_t>(l)] > sizes[static_cast<std::size_t>(best)]) best = l;
  }
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) out.set(x, y, labels[mask.index(x, y)] == best);
  }
  return out;
}

BinaryMask component_near(const BinaryMask& mask, PointF p) {
  int n = 0;
  const std::vector<int> labels = label_foreground(mask, n);
  BinaryMask out(mask.width(), mask.height());
  if (n == 0) return out;
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      const int l = labels[mask.index(x, y)];
      if (l == 0) continue;
      const double d = (x - p.x) * (x - p.x) + (y - p.y) * (y - p.y);
      if (d < best_d) {
        best_d = d;
        best = l;
      }
    }
  }
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) out.set(x, y, labels[mask.index(x, y)] == best);
  }
  return out;
}

namespace {

template <typename Img, typename Make>
Img crop_impl(const Img& img, const Roi& roi, Make make) {
  if (roi.top_left.x < 0 || roi.top_left.y < 0 || roi.bottom_right.x >= img.width() ||
      roi.bottom_right.y >= img.height() || roi.width() < 1 || roi.height() < 1) {
    throw std::out_of_range("crop: roi outside image");
  }
  Img out = make(roi.width(), roi.height());
  for (int y = 0; y < roi.height(); ++y) {
    for (int x = 0; x < roi.width(); ++x) {
      out.at(x, y) = img.at(x + roi.top_left.x, y + roi.top_left.y);
    }
  }
  return out;
}

}  // namespace

ChannelImage crop(const ChannelImage& img, const Roi& roi) {
  return crop_impl(img, roi, [](int w, int h) { return ChannelImage(w, h); });
}

RasterImage crop(const RasterImage& img, const Roi& roi) {
  return crop_impl(img, roi, [](int w, int h) { return RasterImage(w, h); });
}

BinaryMask crop(const BinaryMask& mask, const Roi& roi) {
  const Roi c = clamp_to(roi, mask.width(), mask.height());
  if (!(c == roi)) throw std::out_of_range("crop: roi outside mask");
  BinaryMask out(roi.width(), roi.height());
  for (int y = 0; y < roi.height(); ++y) {
    for (int x = 0; x < roi.width(); ++x) {
      out.set(x, y, mask.test(x + roi.top_left.x, y + roi.top_left.y));
    }
  }
  return out;
}

BinaryMask paste(const BinaryMask& part, const Roi& roi, int width, int height) {
  BinaryMask out(width, height);
  for (int y = 0; y < part.height(); ++y) {
    for (int x = 0; x < part.width(); ++x) {
      const int gx = x + roi.top_left.x;
      const int gy = y + roi.top_left.y;
      if (part.test(x, y) && out.contains(gx, gy)) out.set(gx, gy);
    }
  }
  return out;
}

}  // namespace leukoseg
