#pragma once

#include <cstdint>

#include "leukoseg/image.hpp"

namespace leukoseg {

struct PhantomPalette {
  Rgb background{235, 232, 220};
  Rgb rbc_rim{215, 150, 115};
  Rgb rbc_pallor{228, 190, 165};
  Rgb cytoplasm{150, 110, 210};
  Rgb nucleus{100, 45, 150};
};

struct PhantomParams {
  int width = 320;
  int height = 240;
  int leukocytes = 1;
  int lobes_min = 1;  // nucleus lobes drawn uniformly from [lobes_min, lobes_max]
  int lobes_max = 4;
  double nucleus_radius = 24.0;
  double cytoplasm_ratio = 1.3;  // cytoplasm radius / nucleus radius
  int rbc_count = 10;
  double rbc_radius = 18.0;
  double rbc_radius_jitter = 0.1;  // relative
  double pallor_ratio = 0.45;      // pale centre radius / rbc radius
  double noise_sigma = 0.0;
  // Depth of the RBC pressed against each leukocyte, as a fraction of the RBC
  // diameter; 0 places no adhered RBC.
  double adhesion = 0.0;
  int max_attempts = 2000;
  PhantomPalette palette;

  // Throws std::invalid_argument for out-of-range values.
  void validate() const;
};

struct Phantom {
  RasterImage image;
  BinaryMask gt_cell;  // cytoplasm and nucleus
  BinaryMask gt_nucleus;
  BinaryMask gt_rbc;
  std::uint64_t seed = 0;
  PhantomParams params;
};

// Deterministic per (params, seed). Leukocytes are drawn over the RBCs.
// Throws std::runtime_error when the cells cannot be placed within bounds.
Phantom generate_phantom(const PhantomParams& params, std::uint64_t seed);

}  // namespace leukoseg
