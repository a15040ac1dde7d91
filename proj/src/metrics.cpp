#include "leukoseg/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace leukoseg {

EvalReport evaluate(const BinaryMask& gt, const BinaryMask& pred) {
  require_same_shape(gt, pred, "evaluate");
  EvalReport r;
  r.rs = gt.count();
  if (r.rs == 0) throw std::invalid_argument("evaluate: ground truth is empty");
  r.ts = pred.count();
  const std::size_t both = overlap_count(gt, pred);
  r.os = r.ts - both;
  r.us = r.rs - both;
  const auto rs = static_cast<double>(r.rs);
  const auto os = static_cast<double>(r.os);
  const auto us = static_cast<double>(r.us);
  r.er_rate = (os + us) / rs;
  r.sa = (1.0 - r.er_rate) * 100.0;
  r.or_rate = os / (rs + os);
  r.ur_rate = us / (rs + os);
  return r;
}

MetricSummary summarize(std::span<const double> values) {
  MetricSummary s;
  if (values.empty()) return s;
  const auto n = static_cast<double>(values.size());
  for (double v : values) s.mean += v;
  s.mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.sd = std::sqrt(ss / n);
  return s;
}

EvalSummary summarize(std::span<const EvalReport> reports) {
  std::vector<double> sa, orr, ur, er;
  for (const EvalReport& r : reports) {
    sa.push_back(r.sa);
    orr.push_back(r.or_rate);
    ur.push_back(r.ur_rate);
    er.push_back(r.er_rate);
  }
  return {summarize(sa), summarize(orr), summarize(ur), summarize(er)};
}

}  // namespace leukoseg
