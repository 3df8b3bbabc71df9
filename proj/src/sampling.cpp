#include "css/sampling.hpp"

#include <cmath>

namespace css {

Field gaussian(const Grid& grid, double amplitude, double width, double c1, double c2) {
  const double s = 1.0 / (2.0 * width * width);
  return interior_part(Field::sample(grid, [&](double x1, double x2) {
    const double d1 = x1 - c1, d2 = x2 - c2;
    return amplitude * std::exp(-(d1 * d1 + d2 * d2) * s);
  }));
}

Field random_bumps(const Grid& grid, std::mt19937_64& rng, const BumpOptions& o) {
  std::uniform_int_distribution<int> count(o.min_bumps, o.max_bumps);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double spread = o.center_spread * grid.half_width();
  Field u(grid);
  const int k = count(rng);
  for (int b = 0; b < k; ++b) {
    const double c1 = spread * (2.0 * unit(rng) - 1.0);
    const double c2 = spread * (2.0 * unit(rng) - 1.0);
    const double w = o.min_width + (o.max_width - o.min_width) * unit(rng);
    double a = o.min_amplitude + (o.max_amplitude - o.min_amplitude) * unit(rng);
    if (o.random_signs && unit(rng) < 0.5) a = -a;
    u += gaussian(grid, a, w, c1, c2);
  }
  return u;
}

}  // namespace css
