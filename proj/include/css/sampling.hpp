#pragma once

#include <cstdint>
#include <random>

#include "css/grid.hpp"

namespace css {

struct BumpOptions {
  int min_bumps = 1;
  int max_bumps = 3;
  double center_spread = 0.25;  // centers within this fraction of L
  double min_width = 0.7;
  double max_width = 2.0;
  double min_amplitude = 0.5;
  double max_amplitude = 1.5;
  bool random_signs = true;
};

/// Sum of a few Gaussian bumps with random centers, widths, and signs, zero
/// on the walls.
Field random_bumps(const Grid& grid, std::mt19937_64& rng, const BumpOptions& options = {});

/// exp(-|x - c|^2 / (2 w^2)) scaled by amplitude, zero on the walls.
Field gaussian(const Grid& grid, double amplitude = 1.0, double width = 1.0, double c1 = 0.0, double c2 = 0.0);

}  // namespace css
