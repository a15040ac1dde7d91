#include "leukoseg/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace leukoseg {

namespace {

struct Lobe {
  double cx, cy, a, b, c, s;  // centre, semi-axes, cos/sin of the major axis

  bool covers(double x, double y) const {
    const double dx = x - cx;
    const double dy = y - cy;
    const double u = (dx * c + dy * s) / a;
    const double v = (-dx * s + dy * c) / b;
    return u * u + v * v <= 1.0;
  }
};

struct Leukocyte {
  double cx, cy, rc;
  std::vector<Lobe> lobes;
};

struct Rbc {
  double cx, cy, r;
};

double dist(double ax, double ay, double bx, double by) { return std::hypot(ax - bx, ay - by); }

std::uint8_t channel_noise(std::uint8_t v, double n) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v + n), 0L, 255L));
}

// Parallel elliptical lobes along a diagonal. The rectangles overlap enough
// that any merge order of up to four lobes ends in one nucleus region.
std::vector<Lobe> make_lobes(double cx, double cy, double rn, int count, std::mt19937& rng) {
  if (count == 1) return {{cx, cy, rn, rn, 1.0, 0.0}};
  std::uniform_int_distribution<int> diag(0, 1);
  std::uniform_real_distribution<double> tilt(-3.0, 3.0);
  const double phi = ((diag(rng) == 0 ? 45.0 : 135.0) + tilt(rng)) * std::numbers::pi / 180.0;
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  const double a = 0.95 * rn;
  const double b = 0.6 * rn / count;
  const double spacing = 2.0 * b + 2.0;
  std::vector<Lobe> lobes;
  for (int i = 0; i < count; ++i) {
    const double off = (i - (count - 1) / 2.0) * spacing;
    lobes.push_back({cx - s * off, cy + c * off, a, b, c, s});
  }
  return lobes;
}

}  // namespace

void PhantomParams::validate() const {
  if (width < 16 || height < 16) throw std::invalid_argument("phantom: image too small");
  if (leukocytes < 0) throw std::invalid_argument("phantom: negative leukocyte count");
  if (lobes_min < 1 || lobes_max > 4 || lobes_min > lobes_max) {
    throw std::invalid_argument("phantom: lobes must satisfy 1 <= min <= max <= 4");
  }
  if (!(nucleus_radius >= 4.0)) throw std::invalid_argument("phantom: nucleus radius < 4");
  if (!(cytoplasm_ratio > 1.0)) throw std::invalid_argument("phantom: cytoplasm ratio must exceed 1");
  if (rbc_count < 0 || !(rbc_radius >= 2.0)) throw std::invalid_argument("phantom: bad RBC settings");
  if (!(rbc_radius_jitter >= 0.0 && rbc_radius_jitter < 1.0)) {
    throw std::invalid_argument("phantom: RBC radius jitter outside [0, 1)");
  }
  if (!(pallor_ratio >= 0.0 && pallor_ratio < 1.0)) throw std::invalid_argument("phantom: pallor ratio outside [0, 1)");
  if (!(noise_sigma >= 0.0)) throw std::invalid_argument("phantom: negative noise");
  if (!(adhesion >= 0.0 && adhesion <= 0.5)) throw std::invalid_argument("phantom: adhesion outside [0, 0.5]");
  if (max_attempts < 1) throw std::invalid_argument("phantom: max_attempts < 1");
}

Phantom generate_phantom(const PhantomParams& params, std::uint64_t seed) {
  params.validate();
  std::mt19937 rng(static_cast<std::mt19937::result_type>(seed ^ (seed >> 32)));
  const double w = params.width;
  const double h = params.height;
  const double rc = params.nucleus_radius * params.cytoplasm_ratio;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> lobe_count(params.lobes_min, params.lobes_max);
  auto rbc_r = [&]() {
    return params.rbc_radius * (1.0 + params.rbc_radius_jitter * (2.0 * unit(rng) - 1.0));
  };

  std::vector<Leukocyte> cells;
  for (int i = 0; i < params.leukocytes; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < params.max_attempts && !placed; ++attempt) {
      const double x = rc + 2.0 + unit(rng) * (w - 2.0 * rc - 4.0);
      const double y = rc + 2.0 + unit(rng) * (h - 2.0 * rc - 4.0);
      if (x + rc + 2.0 > w || y + rc + 2.0 > h) continue;
      const bool clear = std::all_of(cells.begin(), cells.end(), [&](const Leukocyte& c) {
        return dist(x, y, c.cx, c.cy) >= 2.0 * rc + 4.0 * params.rbc_radius + 10.0;
      });
      if (!clear) continue;
      cells.push_back({x, y, rc, make_lobes(x, y, params.nucleus_radius, lobe_count(rng), rng)});
      placed = true;
    }
    if (!placed) throw std::runtime_error("phantom: cannot place leukocytes within bounds");
  }

  std::vector<Rbc> rbcs;
  auto inside = [&](double x, double y, double r) {
    return x - r >= 1.0 && y - r >= 1.0 && x + r <= w - 2.0 && y + r <= h - 2.0;
  };
  if (params.adhesion > 0.0) {
    for (const Leukocyte& c : cells) {
      bool placed = false;
      for (int attempt = 0; attempt < params.max_attempts && !placed; ++attempt) {
        const double r = rbc_r();
        const double angle = unit(rng) * 2.0 * std::numbers::pi;
        const double d = c.rc + r - 2.0 * params.adhesion * r;
        const double x = c.cx + d * std::cos(angle);
        const double y = c.cy + d * std::sin(angle);
        if (!inside(x, y, r)) continue;
        rbcs.push_back({x, y, r});
        placed = true;
      }
      if (!placed) throw std::runtime_error("phantom: cannot place adhered RBC within bounds");
    }
  }
  for (int i = 0; i < params.rbc_count; ++i) {
    for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
      const double r = rbc_r();
      const double x = r + 1.0 + unit(rng) * (w - 2.0 * r - 3.0);
      const double y = r + 1.0 + unit(rng) * (h - 2.0 * r - 3.0);
      if (!inside(x, y, r)) continue;
      const bool clear =
          std::all_of(rbcs.begin(), rbcs.end(), [&](const Rbc& o) { return dist(x, y, o.cx, o.cy) >= r + o.r + 3.0; }) &&
          std::all_of(cells.begin(), cells.end(), [&](const Leukocyte& c) { return dist(x, y, c.cx, c.cy) >= c.rc + r + 6.0; });
      if (clear) {
        rbcs.push_back({x, y, r});
        break;
      }
    }
  }

  Phantom out;
  out.seed = seed;
  out.params = params;
  out.image = RasterImage(params.width, params.height, params.palette.background);
  out.gt_cell = BinaryMask(params.width, params.height);
  out.gt_nucleus = BinaryMask(params.width, params.height);
  out.gt_rbc = BinaryMask(params.width, params.height);
  const PhantomPalette& pal = params.palette;
  for (int y = 0; y < params.height; ++y) {
    for (int x = 0; x < params.width; ++x) {
      Rgb& px = out.image.at(x, y);
      for (const Rbc& r : rbcs) {
        const double d = dist(x, y, r.cx, r.cy);
        if (d <= r.r) {
          out.gt_rbc.set(x, y);
          px = d <= params.pallor_ratio * r.r ? pal.rbc_pallor : pal.rbc_rim;
        }
      }
      for (const Leukocyte& c : cells) {
        if (dist(x, y, c.cx, c.cy) > c.rc) continue;
        out.gt_cell.set(x, y);
        px = pal.cytoplasm;
        if (std::any_of(c.lobes.begin(), c.lobes.end(), [&](const Lobe& l) { return l.covers(x, y); })) {
          out.gt_nucleus.set(x, y);
          px = pal.nucleus;
        }
      }
    }
  }

  if (params.noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, params.noise_sigma);
    for (Rgb& px : out.image.pixels()) {
      px.r = channel_noise(px.r, noise(rng));
      px.g = channel_noise(px.g, noise(rng));
      px.b = channel_noise(px.b, noise(rng));
    }
  }
  return out;
}

}  // namespace leukoseg
