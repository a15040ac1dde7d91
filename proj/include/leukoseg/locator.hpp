#pragma once

#include <vector>

#include "leukoseg/regions.hpp"

namespace leukoseg {

struct CleanConfig {
  std::size_t min_area = 50;
  double relative_area = 0.01;  // of the largest component
};

// Opening with a 3x3 cross, removal of components smaller than
// max(min_area, relative_area * largest), then hole filling.
BinaryMask clean_nucleus_mask(const BinaryMask& mask, const CleanConfig& config = {});

// One located nucleus: the merged circumscribed rectangle and the
// components that contributed to it.
struct NucleusRegion {
  Roi roi;
  std::vector<Component> members;
};

// True when the rectangles overlap and both centres fall inside the overlap.
bool should_merge(const Roi& a, const Roi& b);

// Circumscribed rectangles per component, merged pairwise by should_merge
// until nothing changes. Regions are ordered by top-left corner (y, then x).
std::vector<NucleusRegion> locate_nuclei(const BinaryMask& mask);
std::vector<NucleusRegion> locate_nuclei(std::vector<Component> components);

struct RadiusRule {
  double low_circularity = 0.46;   // T1
  double high_circularity = 0.85;  // T2
  double low_factor = 2.6;
  double mid_factor = 2.3;
  double high_factor = 1.6;
};

double radius_factor(double circularity, const RadiusRule& rule = {});
// R_e from the nucleus area and circularity; R = sqrt(S / pi).
double cytoplasm_radius(const ShapeStats& stats, const RadiusRule& rule = {});

struct LeukocyteSite {
  Roi nucleus_roi;
  Roi cytoplasm_roi;
  Roi combined_roi;
  std::vector<Component> nucleus_components;
  ShapeStats nucleus_stats;
  double equivalent_radius = 0.0;
};

LeukocyteSite locate_site(const NucleusRegion& nucleus, int width, int height,
                          const RadiusRule& rule = {});

}  // namespace leukoseg
