#pragma once

#include <span>
#include <vector>

#include "leukoseg/channel.hpp"
#include "leukoseg/histogram.hpp"
#include "leukoseg/image.hpp"
#include "leukoseg/swam.hpp"

namespace leukoseg {

// Per-pixel membership values in [0, 1].
class MembershipMap : public Grid<double> {
 public:
  MembershipMap() = default;
  MembershipMap(int width, int height, double fill);
  MembershipMap(int width, int height, std::vector<double> values);
};

// Inclusive grey interval searched for one threshold.
struct ThresholdRange {
  int lo = 1;
  int hi = 254;
  bool operator==(const ThresholdRange&) const = default;
};

struct IvfsConfig {
  double delta = 0.5;  // lower = mu^(1/delta), upper = mu^delta
  int classes = 2;
  // One range per threshold; empty means every interior grey level [1, 254].
  std::vector<ThresholdRange> ranges;
};

struct ThresholdResult {
  std::vector<int> thresholds;  // strictly increasing
  double divergence = 0.0;
  std::vector<double> region_means;
};

// Class means for thresholds t_1 < ... < t_{N-1}, with t_0 = 0 and the last
// class closed at 255. Classes are [t_{c-1}, t_c); an empty class reports
// the midpoint of its bounds.
std::vector<double> region_means(const Histogram& hist, std::span<const int> thresholds);

// Cauchy-type membership 1 / (1 + |f - avg| / (f_max - f_min)).
double membership(double grey, double class_mean, int f_min, int f_max);

// Probabilistic sum of the interval bounds mu^(1/delta) and mu^delta.
double interval_membership(double mu, double delta);

// Exponential fuzzy divergence between two membership maps.
double fuzzy_divergence(const MembershipMap& a, const MembershipMap& b);
// Per-pixel divergence against the ideal (all-ones) image.
double ideal_divergence_term(double mu);
double divergence_to_ideal(const MembershipMap& a);

// Exhaustive arg-min of the divergence to the ideal image over strictly
// increasing threshold tuples inside config.ranges. Ties keep the
// lexicographically smallest tuple. Throws DegenerateImageError when the
// histogram holds a single grey value and std::invalid_argument when no
// admissible tuple exists.
ThresholdResult search_thresholds(const Histogram& hist, const IvfsConfig& config);
ThresholdResult search_thresholds(const ChannelImage& img, const IvfsConfig& config);

// Windows of +-half_width around the midpoints between adjacent levels,
// clipped to [1, 254]. With fewer than four classes the windows are the ones
// next to the cytoplasm level: the erythrocyte/cytoplasm boundary first,
// then the cytoplasm/nucleus boundary.
std::vector<ThresholdRange> ranges_from_levels(const SwamLevels& levels, int classes,
                                               int half_width = 25);

// G: 0.8 t2 + 0.2 t3; H: 0.8 t1 + 0.2 t2; S: t1.
int final_threshold(const ThresholdResult& result, Channel channel);

}  // namespace leukoseg
