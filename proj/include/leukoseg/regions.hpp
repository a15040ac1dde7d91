#pragma once

#include <optional>
#include <vector>

#include "leukoseg/image.hpp"

namespace leukoseg {

// Closed outer boundary, counter-clockwise as displayed (y pointing down),
// starting at the topmost-leftmost pixel of the component.
struct Contour {
  std::vector<Point> points;

  std::size_t pixel_count() const noexcept { return points.size(); }
  // 8-chain arc length: 1 per axial step, sqrt(2) per diagonal step.
  double length() const noexcept;
};

struct ShapeStats {
  double area = 0.0;
  double perimeter = 0.0;
  PointF centroid;
  double circularity = 0.0;
};

// Inclusive pixel rectangle.
struct Roi {
  Point top_left;
  Point bottom_right;

  int width() const noexcept { return bottom_right.x - top_left.x + 1; }
  int height() const noexcept { return bottom_right.y - top_left.y + 1; }
  bool contains(Point p) const noexcept {
    return p.x >= top_left.x && p.x <= bottom_right.x && p.y >= top_left.y &&
           p.y <= bottom_right.y;
  }
  bool contains(const Roi& other) const noexcept {
    return contains(other.top_left) && contains(other.bottom_right);
  }
  PointF center() const noexcept {
    return {(top_left.x + bottom_right.x) / 2.0, (top_left.y + bottom_right.y) / 2.0};
  }
  bool operator==(const Roi&) const = default;
};

Roi bounding_union(const Roi& a, const Roi& b);
std::optional<Roi> intersection(const Roi& a, const Roi& b);
Roi clamp_to(const Roi& r, int width, int height);

struct Component {
  std::vector<Point> pixels;  // raster order
  Roi bounds;
  ShapeStats stats;
};

// 8-connected foreground components ordered by their first pixel in raster
// order.
std::vector<Component> connected_components(const BinaryMask& mask);

Contour trace_contour(const Component& component);
Contour trace_contour(std::span<const Point> pixels);

ShapeStats shape_stats(const Component& component);
// Stats of a region made of several components: areas and perimeters add,
// the centroid is pixel-weighted.
ShapeStats combined_stats(std::span<const Component> components);
double circularity(double area, double perimeter);

BinaryMask component_mask(std::span<const Point> pixels, int width, int height);

// Morphology with a 3x3 cross. Pixels outside the image are ignored.
BinaryMask erode_cross(const BinaryMask& mask);
BinaryMask dilate_cross(const BinaryMask& mask);
BinaryMask open_cross(const BinaryMask& mask);

// Fills 4-connected background regions that do not touch the image border.
BinaryMask fill_holes(const BinaryMask& mask);
BinaryMask remove_small_components(const BinaryMask& mask, std::size_t min_area);
// Largest component; ties go to the first in raster order. Empty input gives
// an empty mask.
BinaryMask largest_component(const BinaryMask& mask);
// The component containing p, or the one with the pixel closest to p.
BinaryMask component_near(const BinaryMask& mask, PointF p);

ChannelImage crop(const ChannelImage& img, const Roi& roi);
BinaryMask crop(const BinaryMask& mask, const Roi& roi);
RasterImage crop(const RasterImage& img, const Roi& roi);
// Copies the set pixels of part into a full-size mask at roi.top_left.
BinaryMask paste(const BinaryMask& part, const Roi& roi, int width, int height);

}  // namespace leukoseg
