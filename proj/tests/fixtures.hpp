#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "css/functional.hpp"
#include "css/sampling.hpp"

namespace fixture {

inline css::PotentialSpec constant_potential(double omega = 1.0) {
  css::PotentialSpec p;
  p.kind = css::PotentialKind::constant;
  p.omega = omega;
  return p;
}

// 1 - 8 exp(-|x|^2): one bound state below zero.
inline css::PotentialSpec well_potential(double c = 8.0) {
  css::PotentialSpec p;
  p.kind = css::PotentialKind::gaussian_well;
  p.omega = 1.0;
  p.c = c;
  p.sigma = 1.0;
  return p;
}

inline std::shared_ptr<const css::SpectralSplit> make_split(const css::Grid& grid, const css::PotentialSpec& pot,
                                                             int k_max = 6) {
  auto op = std::make_shared<const css::SchrodingerOperator>(css::assemble(pot, grid));
  css::SplitOptions so;
  so.k_max = k_max;
  return std::make_shared<const css::SpectralSplit>(css::split(op, so));
}

inline std::shared_ptr<const css::Functional> make_functional(double L, int N, const css::PotentialSpec& pot,
                                                              css::ModelSpec model = {}, css::GaugeOptions g = {}) {
  const css::Grid grid(L, N);
  return std::make_shared<const css::Functional>(make_split(grid, pot), css::make_model(model), g);
}

inline std::vector<double> values(const css::Field& f) { return {f.values().begin(), f.values().end()}; }

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

inline double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace fixture
