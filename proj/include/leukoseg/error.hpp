#pragma once

#include <stdexcept>

namespace leukoseg {

// Raised when an image carries too little contrast for an operation
// (constant channel, empty threshold selection, f_max == f_min).
class DegenerateImageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace leukoseg
