#pragma once

#include <functional>
#include <span>
#include <vector>

#include "leukoseg/regions.hpp"

namespace leukoseg {

// A sample of the contour in polar form about the nucleus centroid. theta is
// in degrees, counter-clockwise as displayed, measured from the ray
// origin -> start point, in [0, 360).
struct PolarSample {
  double rho = 0.0;
  double theta = 0.0;
};

struct PolarContour {
  PointF origin;
  double reference_angle = 0.0;  // absolute direction of origin -> start, degrees
  std::size_t start_index = 0;   // index of the start point in the source contour
  std::vector<Point> points;     // contour rotated so that points[0] is the start
  std::vector<PolarSample> samples;

  std::size_t size() const noexcept { return samples.size(); }
  // Cartesian position of sample i (image coordinates, y down).
  PointF position(std::size_t i) const;
};

// Two poles bounding the arc to repair: samples m, m + 1, ..., n (cyclic),
// span = number of samples on that arc including both poles.
struct PolePair {
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t span = 0;
  bool operator==(const PolePair&) const = default;
};

struct CcirConfig {
  int chord = 3;               // heading measured over p[i-chord] -> p[i+chord]
  int smoothing_window = 5;    // centred moving average of heading increments
  int persistence = 3;         // minimum reversal length in samples
  double min_reversal_deg = 35.0;
  std::size_t max_poles = 12;  // strongest reversals kept
  double circularity_gain = 1.05;
  double centroid_epsilon = 1.5;
  std::size_t pair_threshold = 2;
  int max_iterations = 10;
};

// Starting point: the contour point nearest to origin, unless probing
// indices 2^Sp mod L finds one whose segment to the origin leaves and
// re-enters the region (two boundary crossings). Falls back to the nearest
// point after ceil(log2 L) + 4 probes. Throws std::invalid_argument for
// contours shorter than four points.
std::size_t select_start(const Contour& contour, PointF origin);

// Number of region-boundary crossings strictly between contour point index
// and origin, walking the segment in quarter-pixel steps.
int segment_crossings(const Contour& contour, std::size_t index, PointF origin);

PolarContour to_polar(const Contour& contour, PointF origin, std::size_t start_index);

// Concavity poles: indices (into the polar samples) of reversals of the
// contour heading angle. The heading is monotone along a convex contour, so
// each sufficiently long and deep decreasing run marks one concavity.
std::vector<std::size_t> detect_concavities(const PolarContour& polar,
                                            const CcirConfig& config = {});

// Every two poles form a pair; the arc kept for repair is the one whose
// interior lies farther from the origin on average.
std::vector<PolePair> pair_poles(const PolarContour& polar, std::span<const std::size_t> poles);
std::vector<PolePair> detect_poles(const PolarContour& polar, const CcirConfig& config = {});

// Replaces rho on the pair's arc by the linear ramp from rho_m to rho_n;
// theta is kept. Throws std::invalid_argument when span < 2.
PolarContour repair_pair(const PolarContour& polar, const PolePair& pair);

// Filled polygon through the polar samples.
BinaryMask rasterize(const PolarContour& polar, int width, int height);

struct RepairOutcome {
  BinaryMask mask;
  std::size_t poles_before = 0;
  std::size_t poles_after = 0;
  double circularity_before = 0.0;
  double circularity_after = 0.0;
  double area_before = 0.0;
  double area_after = 0.0;
  bool accepted = false;
};

struct CcirIteration {
  int iteration = 0;
  const PolarContour* polar = nullptr;
  std::vector<std::size_t> poles;
  std::vector<PolePair> pairs;
};

using CcirTrace = std::function<void(const CcirIteration&)>;

struct CcirResult {
  BinaryMask mask;
  std::vector<RepairOutcome> committed;
  int iterations = 0;
};

// Concave-convex iterative repair of the component containing (or nearest
// to) origin. A repair is committed only when it lowers the pole count,
// raises circularity by circularity_gain and shrinks the area. Stops when no
// repair is committed, when the centroid moves less than centroid_epsilon
// and fewer than pair_threshold pairs remain, or after max_iterations.
CcirResult ccir(const BinaryMask& mask, PointF origin, const CcirConfig& config = {},
                const CcirTrace& trace = {});

}  // namespace leukoseg
