#include "leukoseg/ivfs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "leukoseg/error.hpp"

namespace leukoseg {

namespace {

void check_unit(double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("membership outside [0, 1]");
}

// Prefix sums of count(f) and f * count(f) over the histogram.
struct Prefix {
  std::array<double, 257> count{};
  std::array<double, 257> moment{};

  explicit Prefix(const Histogram& h) {
    for (int f = 0; f < 256; ++f) {
      const auto n = static_cast<double>(h[f]);
      count[static_cast<std::size_t>(f) + 1] = count[static_cast<std::size_t>(f)] + n;
      moment[static_cast<std::size_t>(f) + 1] = moment[static_cast<std::size_t>(f)] + n * f;
    }
  }
};

void means_into(const Prefix& p, std::span<const int> t, std::vector<double>& out) {
  const std::size_t n = t.size() + 1;
  out.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    const int lo = c == 0 ? 0 : t[c - 1];
    const int hi = c == n - 1 ? 256 : t[c];
    const double cnt = p.count[static_cast<std::size_t>(hi)] - p.count[static_cast<std::size_t>(lo)];
    if (cnt > 0.0) {
      out[c] = (p.moment[static_cast<std::size_t>(hi)] - p.moment[static_cast<std::size_t>(lo)]) / cnt;
    } else {
      const int upper = c == n - 1 ? 255 : t[c];
      out[c] = (lo + upper) / 2.0;
    }
  }
}

void check_thresholds(std::span<const int> t) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < 0 || t[i] > 255 || (i > 0 && t[i] <= t[i - 1])) {
      throw std::invalid_argument("thresholds must be strictly increasing grey values");
    }
  }
}

struct Bin {
  int grey;
  double count;
};

// The divergence of one region depends only on its bounds [lo, hi), so each
// region sum is computed once and shared by every tuple containing it.
class DivergenceSearch {
 public:
  DivergenceSearch(const Histogram& hist, double delta)
      : prefix_(hist), delta_(delta), cache_(257 * 257, -1.0) {
    for (int f = 0; f < 256; ++f) {
      if (hist[f] != 0) bins_.push_back({f, static_cast<double>(hist[f])});
    }
    if (bins_.size() < 2) throw DegenerateImageError("fuzzy threshold search: f_max == f_min");
    f_min_ = bins_.front().grey;
    f_max_ = bins_.back().grey;
  }

  double evaluate(std::span<const int> t) {
    double total = 0.0;
    for (std::size_t c = 0; c <= t.size(); ++c) {
      total += region(c == 0 ? 0 : t[c - 1], c == t.size() ? 256 : t[c]);
    }
    return total;
  }

  std::vector<double> means(std::span<const int> t) const {
    std::vector<double> out;
    means_into(prefix_, t, out);
    return out;
  }

 private:
  double region(int lo, int hi) {
    double& slot = cache_[static_cast<std::size_t>(lo) * 257 + static_cast<std::size_t>(hi)];
    if (slot >= 0.0) return slot;
    const auto ulo = static_cast<std::size_t>(lo);
    const auto uhi = static_cast<std::size_t>(hi);
    const double cnt = prefix_.count[uhi] - prefix_.count[ulo];
    double sum = 0.0;
    if (cnt > 0.0) {
      const double mean = (prefix_.moment[uhi] - prefix_.moment[ulo]) / cnt;
      auto it = std::lower_bound(bins_.begin(), bins_.end(), lo,
                                 [](const Bin& b, int g) { return b.grey < g; });
      for (; it != bins_.end() && it->grey < hi; ++it) {
        const double mu = membership(it->grey, mean, f_min_, f_max_);
        sum += it->count * ideal_divergence_term(interval_membership(mu, delta_));
      }
    }
    slot = sum;
    return sum;
  }

  Prefix prefix_;
  double delta_;
  std::vector<Bin> bins_;
  std::vector<double> cache_;
  int f_min_ = 0;
  int f_max_ = 0;
};

}  // namespace

MembershipMap::MembershipMap(int width, int height, double fill) : Grid(width, height, fill) {
  check_unit(fill);
}

MembershipMap::MembershipMap(int width, int height, std::vector<double> values)
    : Grid(width, height, std::move(values)) {
  for (double v : data()) check_unit(v);
}

std::vector<double> region_means(const Histogram& hist, std::span<const int> thresholds) {
  check_thresholds(thresholds);
  std::vector<double> out;
  means_into(Prefix(hist), thresholds, out);
  return out;
}

double membership(double grey, double class_mean, int f_min, int f_max) {
  if (f_max <= f_min) throw DegenerateImageError("membership: f_max == f_min");
  const double k = 1.0 / static_cast<double>(f_max - f_min);
  return 1.0 / (1.0 + k * std::abs(grey - class_mean));
}

double interval_membership(double mu, double delta) {
  const double lower = std::pow(mu, 1.0 / delta);
  const double upper = std::pow(mu, delta);
  return lower + upper - lower * upper;
}

double fuzzy_divergence(const MembershipMap& a, const MembershipMap& b) {
  require_same_shape(a, b, "fuzzy_divergence");
  auto da = a.data();
  auto db = b.data();
  double total = 0.0;
  for (std::size_t i = 0; i < da.size(); ++i) {
    const double d = da[i] - db[i];
    total += 2.0 - (1.0 - d) * std::exp(d) - (1.0 + d) * std::exp(-d);
  }
  return total;
}

double ideal_divergence_term(double mu) {
  return 2.0 - (2.0 - mu) * std::exp(mu - 1.0) - mu * std::exp(1.0 - mu);
}

double divergence_to_ideal(const MembershipMap& a) {
  double total = 0.0;
  for (double mu : a.data()) total += ideal_divergence_term(mu);
  return total;
}

ThresholdResult search_thresholds(const Histogram& hist, const IvfsConfig& config) {
  if (config.classes < 2) throw std::invalid_argument("fuzzy threshold search needs >= 2 classes");
  if (!(config.delta > 0.0 && config.delta < 1.0)) {
    throw std::invalid_argument("interval exponent delta must lie in (0, 1)");
  }
  const auto k = static_cast<std::size_t>(config.classes - 1);
  std::vector<ThresholdRange> ranges = config.ranges;
  if (ranges.empty()) ranges.assign(k, ThresholdRange{});
  if (ranges.size() != k) throw std::invalid_argument("one search range per threshold required");
  for (ThresholdRange& r : ranges) {
    r.lo = std::max(r.lo, 0);
    r.hi = std::min(r.hi, 255);
    if (r.lo > r.hi) throw std::invalid_argument("empty threshold search range");
  }

  DivergenceSearch search(hist, config.delta);
  ThresholdResult best;
  best.divergence = std::numeric_limits<double>::infinity();

  // Odometer over strictly increasing tuples in lexicographic order.
  std::vector<int> t(k);
  auto reset_from = [&](std::size_t i) {
    for (; i < k; ++i) {
      t[i] = i == 0 ? ranges[0].lo : std::max(ranges[i].lo, t[i - 1] + 1);
      if (t[i] > ranges[i].hi) return false;
    }
    return true;
  };
  bool valid = reset_from(0);
  // Backtracks until a prefix admits a completion or the space is exhausted.
  auto advance = [&]() {
    std::size_t i = k;
    while (i > 0) {
      --i;
      if (t[i] < ranges[i].hi) {
        ++t[i];
        if (reset_from(i + 1)) return true;
        // No completion for this prefix; the next value of t[i] will not
        // help either since later lower bounds only grow.
      }
    }
    return false;
  };
  if (!valid) valid = advance();
  if (!valid) throw std::invalid_argument("no admissible threshold tuple in the search ranges");

  do {
    const double d = search.evaluate(t);
    if (d < best.divergence) {
      best.divergence = d;
      best.thresholds = t;
    }
  } while (advance());
  best.region_means = search.means(best.thresholds);
  return best;
}

ThresholdResult search_thresholds(const ChannelImage& img, const IvfsConfig& config) {
  return search_thresholds(histogram(img), config);
}

std::vector<ThresholdRange> ranges_from_levels(const SwamLevels& levels, int classes,
                                               int half_width) {
  if (classes < 2 || classes > 4) throw std::invalid_argument("classes must be 2, 3 or 4");
  const auto l = levels.ascending();
  std::array<int, 3> mids{};
  for (std::size_t i = 0; i < 3; ++i) mids[i] = round_grey((l[i] + l[i + 1]) / 2.0);

  // Index of the erythrocyte/cytoplasm midpoint in grey order.
  const std::size_t cyto_lower = 1;
  std::size_t first = 0;
  if (classes == 2) {
    first = cyto_lower;
  } else if (classes == 3) {
    first = levels.order == LevelOrder::kAscending ? 1 : 0;
  }
  std::vector<ThresholdRange> out;
  for (std::size_t i = first; i < first + static_cast<std::size_t>(classes - 1); ++i) {
    out.push_back({std::clamp(mids[i] - half_width, 1, 254), std::clamp(mids[i] + half_width, 1, 254)});
  }
  return out;
}

int final_threshold(const ThresholdResult& result, Channel channel) {
  const auto& t = result.thresholds;
  if (static_cast<int>(t.size()) != classes_for(channel) - 1) {
    throw std::invalid_argument("threshold count does not match the channel's class count");
  }
  switch (channel) {
    case Channel::kG: return round_grey(0.8 * t[1] + 0.2 * t[2]);
    case Channel::kH: return round_grey(0.8 * t[0] + 0.2 * t[1]);
    case Channel::kS: return t[0];
  }
  return t[0];
}

}  // namespace leukoseg
