#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <opencv2/imgproc.hpp>

#include "leukoseg/pipeline.hpp"

namespace leukoseg {

namespace {

struct Ellipse {
  double cx = 0.0;
  double cy = 0.0;
  double a = 0.0;  // semi-axis along angle
  double b = 0.0;
  double angle = 0.0;  // radians, image orientation (y down)
};

BinaryMask fill_ellipse(const Ellipse& e, int width, int height) {
  BinaryMask out(width, height);
  const double c = std::cos(e.angle);
  const double s = std::sin(e.angle);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double dx = x - e.cx;
      const double dy = y - e.cy;
      const double u = (dx * c + dy * s) / e.a;
      const double v = (-dx * s + dy * c) / e.b;
      if (u * u + v * v <= 1.0) out.set(x, y);
    }
  }
  return out;
}

Ellipse box_ellipse(const BinaryMask& mask) {
  int x0 = mask.width();
  int y0 = mask.height();
  int x1 = -1;
  int y1 = -1;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.test(x, y)) continue;
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  }
  return {(x0 + x1) / 2.0, (y0 + y1) / 2.0, (x1 - x0 + 1) / 2.0, (y1 - y0 + 1) / 2.0, 0.0};
}

}  // namespace

double border_adhesion(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  double up = 0, dn = 0, lt = 0, rt = 0;
  for (int x = 0; x < w; ++x) {
    up += mask.test(x, 0);
    dn += mask.test(x, h - 1);
  }
  for (int y = 0; y < h; ++y) {
    lt += mask.test(0, y);
    rt += mask.test(w - 1, y);
  }
  const int acc = (up > 0) + (dn > 0) + (lt > 0) + (rt > 0);
  if (acc == 0) return 0.0;
  return ((up + dn) / w + (lt + rt) / h) / acc;
}

double saturation_mean(const BinaryMask& mask, const ChannelImage& saturation,
                       const BinaryMask& nucleus) {
  require_same_shape(mask, saturation, "saturation_mean");
  require_same_shape(mask, nucleus, "saturation_mean");
  double sum = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.test(x, y) && !nucleus.test(x, y)) {
        sum += saturation.at(x, y);
        ++n;
      }
    }
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n) / 255.0;
}

BinaryMask reference_ellipse(const BinaryMask& reference) {
  if (reference.none()) return BinaryMask(reference.width(), reference.height());
  std::vector<cv::Point2f> boundary;
  for (const Component& c : connected_components(reference)) {
    for (const Point& p : trace_contour(c).points) {
      boundary.emplace_back(static_cast<float>(p.x), static_cast<float>(p.y));
    }
  }
  Ellipse e = box_ellipse(reference);
  if (boundary.size() >= 5) {
    const cv::RotatedRect r = cv::fitEllipseDirect(boundary);
    const double a = r.size.width / 2.0;
    const double b = r.size.height / 2.0;
    if (std::isfinite(a) && std::isfinite(b) && a >= 0.5 && b >= 0.5 && std::isfinite(r.center.x) &&
        std::isfinite(r.center.y)) {
      e = {r.center.x, r.center.y, a, b, r.angle * std::numbers::pi / 180.0};
    }
  }
  return fill_ellipse(e, reference.width(), reference.height());
}

double circle_similarity(const BinaryMask& mask, const BinaryMask& ellipse) {
  require_same_shape(mask, ellipse, "circle_similarity");
  const double ref = static_cast<double>(ellipse.count());
  if (ref == 0.0) return 0.0;
  const auto overlap = static_cast<double>(overlap_count(mask, ellipse));
  const double out_a = static_cast<double>(mask.count()) - overlap;
  const double in_a = ref - overlap;
  return std::clamp(1.0 - (out_a + in_a) / ref, 0.0, 1.0);
}

double decision_value(const DecisionScore& s) {
  return 1.0 / (3.0 - s.cir_rato - s.sgmv - s.cir_sim + s.b_adh);
}

void score_candidates(std::span<CandidateMask> candidates, const ChannelImage& saturation,
                      const BinaryMask& nucleus_sub) {
  if (candidates.empty()) throw std::invalid_argument("score_candidates: no candidates");
  BinaryMask hsg_mask = candidates.front().mask;
  for (const CandidateMask& c : candidates.subspan(1)) hsg_mask = mask_or(hsg_mask, c.mask);
  const BinaryMask ellipse = reference_ellipse(hsg_mask);

  for (CandidateMask& c : candidates) {
    DecisionScore& s = c.scores;
    const auto comps = connected_components(c.mask);
    s.cir_rato = comps.empty() ? 0.0 : combined_stats(comps).circularity;
    s.b_adh = border_adhesion(c.mask);
    s.sgmv = saturation_mean(c.mask, saturation, nucleus_sub);
    s.cir_sim = circle_similarity(c.mask, ellipse);
    s.dec = decision_value(s);
  }
}

std::size_t decide(std::span<const CandidateMask> candidates) {
  if (candidates.empty()) throw std::invalid_argument("decide: no candidates");
  auto rank = [](Channel c) { return static_cast<int>(c); };
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const auto& a = candidates[i];
    const auto& b = candidates[best];
    if (a.scores.dec > b.scores.dec || (a.scores.dec == b.scores.dec && rank(a.channel) < rank(b.channel))) {
      best = i;
    }
  }
  return best;
}

}  // namespace leukoseg
