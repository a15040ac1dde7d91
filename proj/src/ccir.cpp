#include "leukoseg/ccir.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace leukoseg {

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

double wrap360(double a) {
  a = std::fmod(a, 360.0);
  return a < 0.0 ? a + 360.0 : a;
}

double wrap180(double a) {
  a = wrap360(a);
  return a > 180.0 ? a - 360.0 : a;
}

// Absolute direction of v, counter-clockwise as displayed.
double direction(double dx, double dy) { return std::atan2(-dy, dx) * kDeg; }

// Filled region bounded by a contour, in a padded local frame.
class ContourRegion {
 public:
  explicit ContourRegion(const Contour& contour) {
    int x0 = std::numeric_limits<int>::max();
    int y0 = x0;
    int x1 = std::numeric_limits<int>::min();
    int y1 = x1;
    for (const Point& p : contour.points) {
      x0 = std::min(x0, p.x);
      y0 = std::min(y0, p.y);
      x1 = std::max(x1, p.x);
      y1 = std::max(y1, p.y);
    }
    offset_ = {x0 - 1, y0 - 1};
    BinaryMask border(x1 - x0 + 3, y1 - y0 + 3);
    for (const Point& p : contour.points) border.set(p.x - offset_.x, p.y - offset_.y);
    region_ = fill_holes(border);
  }

  bool inside(PointF p) const {
    const int x = static_cast<int>(std::lround(p.x)) - offset_.x;
    const int y = static_cast<int>(std::lround(p.y)) - offset_.y;
    return region_.contains(x, y) && region_.test(x, y);
  }

 private:
  Point offset_;
  BinaryMask region_;
};

int crossings(const ContourRegion& region, Point from, PointF to) {
  const double dx = to.x - from.x;
  const double dy = to.y - from.y;
  const int steps = std::max(1, static_cast<int>(std::ceil(std::hypot(dx, dy) / 0.25)));
  bool state = true;
  int n = 0;
  for (int s = 1; s <= steps; ++s) {
    const double t = static_cast<double>(s) / steps;
    const bool in = region.inside({from.x + t * dx, from.y + t * dy});
    if (in != state) {
      ++n;
      state = in;
    }
  }
  return n;
}

std::size_t nearest_index(const Contour& contour, PointF origin) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < contour.points.size(); ++i) {
    const double d = std::hypot(contour.points[i].x - origin.x, contour.points[i].y - origin.y);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

struct Analysis {
  Component component;
  PolarContour polar;
  std::vector<std::size_t> poles;
  std::vector<PolePair> pairs;
};

// Component holding the foreground pixel nearest to origin; ties go to the
// pixel that comes first in raster order, as in component_near.
std::optional<Component> nearest_component(const BinaryMask& mask, PointF origin) {
  auto comps = connected_components(mask);
  if (comps.empty()) return std::nullopt;
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  std::size_t best_at = 0;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    for (const Point& p : comps[i].pixels) {
      const double d = (p.x - origin.x) * (p.x - origin.x) + (p.y - origin.y) * (p.y - origin.y);
      const std::size_t at = mask.index(p.x, p.y);
      if (d < best_d || (d == best_d && at < best_at)) {
        best_d = d;
        best_at = at;
        best = i;
      }
    }
  }
  return std::move(comps[best]);
}

BinaryMask to_mask(const Component& c, int width, int height) {
  BinaryMask out(width, height);
  for (const Point& p : c.pixels) out.set(p);
  return out;
}

bool analyze(Component component, PointF origin, const CcirConfig& config, Analysis& out) {
  out.component = std::move(component);
  const Contour contour = trace_contour(out.component);
  if (contour.points.size() < 4) return false;
  out.polar = to_polar(contour, origin, select_start(contour, origin));
  out.poles = detect_concavities(out.polar, config);
  out.pairs = pair_poles(out.polar, out.poles);
  return true;
}

}  // namespace

PointF PolarContour::position(std::size_t i) const {
  const double a = (reference_angle + samples[i].theta) / kDeg;
  return {origin.x + samples[i].rho * std::cos(a), origin.y - samples[i].rho * std::sin(a)};
}

int segment_crossings(const Contour& contour, std::size_t index, PointF origin) {
  return crossings(ContourRegion(contour), contour.points.at(index), origin);
}

std::size_t select_start(const Contour& contour, PointF origin) {
  const std::size_t length = contour.points.size();
  if (length < 4) throw std::invalid_argument("select_start: contour shorter than 4 points");

  const ContourRegion region(contour);
  const std::size_t nearest = nearest_index(contour, origin);
  if (crossings(region, contour.points[nearest], origin) == 2) return nearest;

  const auto max_step =
      static_cast<int>(std::ceil(std::log2(static_cast<double>(length)))) + 4;
  for (int step = 1; step <= max_step; ++step) {
    const std::size_t candidate = static_cast<std::size_t>((std::uint64_t{1} << step) % length);
    if (crossings(region, contour.points[candidate], origin) == 2) return candidate;
  }
  return nearest;
}

PolarContour to_polar(const Contour& contour, PointF origin, std::size_t start_index) {
  const std::size_t n = contour.points.size();
  if (start_index >= n) throw std::out_of_range("to_polar: start index outside contour");
  PolarContour polar;
  polar.origin = origin;
  polar.start_index = start_index;
  polar.points.reserve(n);
  polar.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) polar.points.push_back(contour.points[(start_index + i) % n]);

  const Point s = polar.points.front();
  polar.reference_angle = direction(s.x - origin.x, s.y - origin.y);
  for (const Point& p : polar.points) {
    const double dx = p.x - origin.x;
    const double dy = p.y - origin.y;
    polar.samples.push_back({std::hypot(dx, dy), wrap360(direction(dx, dy) - polar.reference_angle)});
  }
  return polar;
}

std::vector<std::size_t> detect_concavities(const PolarContour& polar, const CcirConfig& config) {
  const auto& pts = polar.points;
  const auto n = static_cast<std::ptrdiff_t>(pts.size());
  const std::ptrdiff_t k = std::max(1, config.chord);
  if (n < 2 * k + config.smoothing_window + 2) return {};
  auto at = [&](std::ptrdiff_t i) -> const Point& { return pts[static_cast<std::size_t>(((i % n) + n) % n)]; };

  std::vector<double> heading(static_cast<std::size_t>(n));
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Point& a = at(i - k);
    const Point& b = at(i + k);
    heading[static_cast<std::size_t>(i)] = direction(b.x - a.x, b.y - a.y);
  }
  std::vector<double> step(static_cast<std::size_t>(n));
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    step[static_cast<std::size_t>(i)] =
        wrap180(heading[static_cast<std::size_t>((i + 1) % n)] - heading[static_cast<std::size_t>(i)]);
  }
  const std::ptrdiff_t half = std::max(0, config.smoothing_window / 2);
  std::vector<double> smooth(static_cast<std::size_t>(n));
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::ptrdiff_t j = -half; j <= half; ++j) sum += step[static_cast<std::size_t>(((i + j) % n + n) % n)];
    smooth[static_cast<std::size_t>(i)] = sum / static_cast<double>(2 * half + 1);
  }

  std::ptrdiff_t anchor = -1;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    if (smooth[static_cast<std::size_t>(i)] >= 0.0) {
      anchor = i;
      break;
    }
  }
  if (anchor < 0) return {};

  struct Reversal {
    std::size_t index;
    double drop;
  };
  std::vector<Reversal> found;
  std::ptrdiff_t run_len = 0;
  double run_sum = 0.0;
  double run_min = 0.0;
  std::size_t run_arg = 0;
  auto close_run = [&]() {
    if (run_len >= config.persistence && -run_sum >= config.min_reversal_deg) {
      found.push_back({run_arg, -run_sum});
    }
    run_len = 0;
    run_sum = 0.0;
  };
  for (std::ptrdiff_t s = 1; s <= n; ++s) {
    const auto i = static_cast<std::size_t>((anchor + s) % n);
    const double v = smooth[i];
    if (v < 0.0) {
      if (run_len == 0 || v < run_min) {
        run_min = v;
        run_arg = (i + 1) % static_cast<std::size_t>(n);
      }
      ++run_len;
      run_sum += v;
    } else if (run_len > 0) {
      close_run();
    }
  }
  if (run_len > 0) close_run();

  if (found.size() > config.max_poles) {
    std::stable_sort(found.begin(), found.end(),
                     [](const Reversal& a, const Reversal& b) { return a.drop > b.drop; });
    found.resize(config.max_poles);
  }
  std::vector<std::size_t> poles;
  for (const Reversal& r : found) poles.push_back(r.index);
  std::sort(poles.begin(), poles.end());
  return poles;
}

std::vector<PolePair> pair_poles(const PolarContour& polar, std::span<const std::size_t> poles) {
  const std::size_t n = polar.size();
  std::vector<PolePair> pairs;
  if (poles.size() < 2 || n == 0) return pairs;

  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + polar.samples[i].rho;
  const double total = prefix[n];
  // Sum of rho over the cyclic arc a, a + 1, ..., b.
  auto arc_sum = [&](std::size_t a, std::size_t b) {
    return a <= b ? prefix[b + 1] - prefix[a] : (total - prefix[a]) + prefix[b + 1];
  };
  auto arc_len = [&](std::size_t a, std::size_t b) { return (b + n - a) % n + 1; };

  // Of the two arcs between two poles, the adhered object is the one lying
  // farther from the nucleus centroid.
  for (std::size_t i = 0; i < poles.size(); ++i) {
    for (std::size_t j = i + 1; j < poles.size(); ++j) {
      const std::size_t a = poles[i];
      const std::size_t b = poles[j];
      if (arc_len(a, b) < 3 || arc_len(b, a) < 3) continue;
      const std::size_t ab_in = arc_len(a, b) - 2;
      const std::size_t ba_in = arc_len(b, a) - 2;
      const double ab = arc_sum((a + 1) % n, (b + n - 1) % n) / static_cast<double>(ab_in);
      const double ba = arc_sum((b + 1) % n, (a + n - 1) % n) / static_cast<double>(ba_in);
      if (ab > ba) {
        pairs.push_back({a, b, arc_len(a, b)});
      } else if (ba > ab) {
        pairs.push_back({b, a, arc_len(b, a)});
      }
    }
  }
  return pairs;
}

std::vector<PolePair> detect_poles(const PolarContour& polar, const CcirConfig& config) {
  const auto poles = detect_concavities(polar, config);
  return pair_poles(polar, poles);
}

PolarContour repair_pair(const PolarContour& polar, const PolePair& pair) {
  const std::size_t n = polar.size();
  if (pair.span < 2) throw std::invalid_argument("repair_pair: fewer than 2 samples between poles");
  if (pair.m >= n || pair.n >= n || pair.span > n) throw std::out_of_range("repair_pair: pole outside contour");
  PolarContour out = polar;
  const double rho0 = polar.samples[pair.m].rho;
  const double rho1 = polar.samples[pair.n].rho;
  const double delta = (rho1 - rho0) / static_cast<double>(pair.span - 1);
  for (std::size_t i = 0; i < pair.span; ++i) {
    out.samples[(pair.m + i) % n].rho = rho0 + static_cast<double>(i) * delta;
  }
  out.samples[pair.n].rho = rho1;
  return out;
}

BinaryMask rasterize(const PolarContour& polar, int width, int height) {
  BinaryMask out(width, height);
  const std::size_t n = polar.size();
  if (n == 0) return out;
  std::vector<PointF> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = polar.position(i);

  // Edge a -> b crosses row y when exactly one endpoint lies at or above it,
  // i.e. min(a.y, b.y) <= y < max(a.y, b.y).
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(height));
  for (std::size_t i = 0; i < n; ++i) {
    const PointF a = v[i];
    const PointF b = v[(i + 1) % n];
    const double lo = std::min(a.y, b.y);
    const double hi = std::max(a.y, b.y);
    const int y0 = std::max(0, static_cast<int>(std::ceil(lo)));
    const int y1 = std::min(height - 1, static_cast<int>(std::ceil(hi)) - 1);
    for (int y = y0; y <= y1; ++y) {
      rows[static_cast<std::size_t>(y)].push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
    }
  }
  for (int y = 0; y < height; ++y) {
    auto& xs = rows[static_cast<std::size_t>(y)];
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
      const int x0 = std::max(0, static_cast<int>(std::ceil(xs[i])));
      const int x1 = std::min(width - 1, static_cast<int>(std::floor(xs[i + 1])));
      for (int x = x0; x <= x1; ++x) out.set(x, y);
    }
  }
  // Boundary pixels themselves belong to the region.
  for (std::size_t i = 0; i < n; ++i) {
    const PointF a = v[i];
    const PointF b = v[(i + 1) % n];
    const int steps = std::max(1, static_cast<int>(std::ceil(std::hypot(b.x - a.x, b.y - a.y) * 2.0)));
    for (int s = 0; s <= steps; ++s) {
      const double t = static_cast<double>(s) / steps;
      const int x = static_cast<int>(std::lround(a.x + t * (b.x - a.x)));
      const int y = static_cast<int>(std::lround(a.y + t * (b.y - a.y)));
      if (out.contains(x, y)) out.set(x, y);
    }
  }
  return out;
}

namespace {

// The repair loop on a mask cropped tightly around a single component.
CcirResult repair_loop(BinaryMask single, PointF origin, const CcirConfig& config,
                       const CcirTrace& trace) {
  CcirResult result;
  result.mask = std::move(single);
  for (int it = 0; it < config.max_iterations; ++it) {
    Analysis now;
    auto current = nearest_component(result.mask, origin);
    if (!current || !analyze(std::move(*current), origin, config, now)) break;
    result.iterations = it + 1;
    if (trace) trace({it, &now.polar, now.poles, now.pairs});
    if (now.pairs.empty()) break;

    RepairOutcome best;
    Analysis best_after;
    for (const PolePair& pair : now.pairs) {
      const int w = result.mask.width();
      const int h = result.mask.height();
      auto candidate = nearest_component(mask_and(rasterize(repair_pair(now.polar, pair), w, h), result.mask), origin);
      Analysis after;
      if (!candidate || !analyze(std::move(*candidate), origin, config, after)) continue;

      RepairOutcome o;
      o.poles_before = now.poles.size();
      o.poles_after = after.poles.size();
      o.circularity_before = now.component.stats.circularity;
      o.circularity_after = after.component.stats.circularity;
      o.area_before = now.component.stats.area;
      o.area_after = after.component.stats.area;
      o.accepted = o.poles_after < o.poles_before &&
                   o.circularity_after >= config.circularity_gain * o.circularity_before &&
                   o.area_after < o.area_before;
      if (o.accepted && (!best.accepted || o.circularity_after > best.circularity_after)) {
        o.mask = to_mask(after.component, w, h);
        best = std::move(o);
        best_after = std::move(after);
      }
    }
    if (!best.accepted) break;

    const PointF before = now.component.stats.centroid;
    const PointF moved = best_after.component.stats.centroid;
    result.mask = best.mask;
    result.committed.push_back(std::move(best));
    if (std::hypot(moved.x - before.x, moved.y - before.y) < config.centroid_epsilon &&
        best_after.pairs.size() < config.pair_threshold) {
      break;
    }
  }
  return result;
}

}  // namespace

CcirResult ccir(const BinaryMask& mask, PointF origin, const CcirConfig& config,
                const CcirTrace& trace) {
  BinaryMask single = component_near(mask, origin);
  const auto comps = connected_components(single);
  if (comps.empty()) return {std::move(single), {}, 0};

  const Roi& b = comps.front().bounds;
  const Roi roi = clamp_to({{b.top_left.x - 1, b.top_left.y - 1}, {b.bottom_right.x + 1, b.bottom_right.y + 1}},
                           mask.width(), mask.height());
  const Point off = roi.top_left;
  const PointF local_origin{origin.x - off.x, origin.y - off.y};

  CcirTrace local_trace;
  if (trace) {
    // Observers see image coordinates.
    local_trace = [&](const CcirIteration& step) {
      PolarContour shifted = *step.polar;
      shifted.origin = origin;
      for (Point& p : shifted.points) p = {p.x + off.x, p.y + off.y};
      trace({step.iteration, &shifted, step.poles, step.pairs});
    };
  }
  CcirResult result = repair_loop(crop(single, roi), local_origin, config, local_trace);
  result.mask = paste(result.mask, roi, mask.width(), mask.height());
  for (RepairOutcome& o : result.committed) o.mask = paste(o.mask, roi, mask.width(), mask.height());
  return result;
}

}  // namespace leukoseg
