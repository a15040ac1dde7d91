#include "leukoseg/locator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace leukoseg {

BinaryMask clean_nucleus_mask(const BinaryMask& mask, const CleanConfig& config) {
  const BinaryMask opened = open_cross(mask);
  const auto components = connected_components(opened);
  std::size_t largest = 0;
  for (const Component& c : components) largest = std::max(largest, c.pixels.size());
  const auto floor = std::max(config.min_area,
                              static_cast<std::size_t>(std::ceil(config.relative_area *
                                                                 static_cast<double>(largest))));
  BinaryMask kept(mask.width(), mask.height());
  for (const Component& c : components) {
    if (c.pixels.size() < floor) continue;
    for (const Point& p : c.pixels) kept.set(p);
  }
  return fill_holes(kept);
}

bool should_merge(const Roi& a, const Roi& b) {
  const auto overlap = intersection(a, b);
  if (!overlap) return false;
  auto inside = [&](PointF c) {
    return c.x >= overlap->top_left.x && c.x <= overlap->bottom_right.x &&
           c.y >= overlap->top_left.y && c.y <= overlap->bottom_right.y;
  };
  return inside(a.center()) && inside(b.center());
}

std::vector<NucleusRegion> locate_nuclei(const BinaryMask& mask) {
  return locate_nuclei(connected_components(mask));
}

std::vector<NucleusRegion> locate_nuclei(std::vector<Component> components) {
  std::vector<NucleusRegion> regions;
  regions.reserve(components.size());
  for (Component& c : components) {
    const Roi r = c.bounds;
    regions.push_back({r, {std::move(c)}});
  }

  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < regions.size() && !merged; ++i) {
      for (std::size_t j = i + 1; j < regions.size(); ++j) {
        if (!should_merge(regions[i].roi, regions[j].roi)) continue;
        regions[i].roi = bounding_union(regions[i].roi, regions[j].roi);
        for (Component& c : regions[j].members) regions[i].members.push_back(std::move(c));
        regions.erase(regions.begin() + static_cast<std::ptrdiff_t>(j));
        merged = true;
        break;
      }
    }
  }

  for (NucleusRegion& r : regions) {
    std::sort(r.members.begin(), r.members.end(), [](const Component& a, const Component& b) {
      return a.pixels.front() < b.pixels.front();
    });
  }
  std::sort(regions.begin(), regions.end(), [](const NucleusRegion& a, const NucleusRegion& b) {
    if (a.roi.top_left.y != b.roi.top_left.y) return a.roi.top_left.y < b.roi.top_left.y;
    if (a.roi.top_left.x != b.roi.top_left.x) return a.roi.top_left.x < b.roi.top_left.x;
    return a.members.front().pixels.front() < b.members.front().pixels.front();
  });
  return regions;
}

double radius_factor(double circularity, const RadiusRule& rule) {
  if (circularity < rule.low_circularity) return rule.low_factor;
  if (circularity < rule.high_circularity) return rule.mid_factor;
  return rule.high_factor;
}

double cytoplasm_radius(const ShapeStats& stats, const RadiusRule& rule) {
  if (stats.area <= 0.0) throw std::invalid_argument("cytoplasm_radius: nucleus area is zero");
  const double r = std::sqrt(stats.area / std::numbers::pi);
  return radius_factor(stats.circularity, rule) * r;
}

LeukocyteSite locate_site(const NucleusRegion& nucleus, int width, int height,
                          const RadiusRule& rule) {
  LeukocyteSite site;
  site.nucleus_components = nucleus.members;
  site.nucleus_stats = combined_stats(nucleus.members);
  site.nucleus_roi = clamp_to(nucleus.roi, width, height);
  site.equivalent_radius = cytoplasm_radius(site.nucleus_stats, rule);

  const PointF c = site.nucleus_stats.centroid;
  const double re = site.equivalent_radius;
  const Roi square{{static_cast<int>(std::lround(c.x - re)), static_cast<int>(std::lround(c.y - re))},
                   {static_cast<int>(std::lround(c.x + re)), static_cast<int>(std::lround(c.y + re))}};
  site.cytoplasm_roi = clamp_to(square, width, height);
  site.combined_roi = bounding_union(site.nucleus_roi, site.cytoplasm_roi);
  return site;
}

}  // namespace leukoseg
