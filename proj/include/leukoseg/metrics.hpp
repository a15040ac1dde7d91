#pragma once

#include <cstddef>
#include <span>

#include "leukoseg/image.hpp"

namespace leukoseg {

struct EvalReport {
  double sa = 0.0;  // percent
  double or_rate = 0.0;
  double ur_rate = 0.0;
  double er_rate = 0.0;
  std::size_t rs = 0;  // |gt|
  std::size_t ts = 0;  // |pred|
  std::size_t os = 0;  // |pred \ gt|
  std::size_t us = 0;  // |gt \ pred|
};

// Misclassified pixels are the symmetric difference, so SA = 100 (1 - ER).
// Throws DimensionMismatchError for unequal shapes and std::invalid_argument
// when gt is empty.
EvalReport evaluate(const BinaryMask& gt, const BinaryMask& pred);

struct MetricSummary {
  double mean = 0.0;
  double sd = 0.0;  // population standard deviation
};

MetricSummary summarize(std::span<const double> values);

struct EvalSummary {
  MetricSummary sa;
  MetricSummary or_rate;
  MetricSummary ur_rate;
  MetricSummary er_rate;
};

EvalSummary summarize(std::span<const EvalReport> reports);

}  // namespace leukoseg
