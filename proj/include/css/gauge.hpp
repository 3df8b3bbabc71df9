#pragma once

#include <memory>

#include "css/grid.hpp"

namespace css {

/// Gauge potentials generated by one u, with the density they came from.
struct GaugeSet {
  Field A0;
  Field A1;
  Field A2;
  Field source_density;  // u^2 / 2
  double u_norm_sq = 0.0;
};

struct GaugeResiduals {
  double coulomb = 0.0;  // || d1 A1 + d2 A2 ||_L2
  double curl = 0.0;     // || d1 A2 - d2 A1 + u^2/2 ||_L2
};

/// First-order change of the gauge potentials along a direction v.
struct GaugeVariation {
  Field dA0;
  Field dA1;
  Field dA2;
};

struct GaugeOptions {
  KernelQuadrature quadrature = KernelQuadrature::corrected;
  // Test hook: flips the sign of K1 so that the curl law breaks.
  bool flip_k1_sign = false;
};

/// Evaluates
///   A1 = K2 * (u^2/2),  A2 = -K1 * (u^2/2),  A0 = K1 * (A2 u^2) - K2 * (A1 u^2)
/// with K_j(x) = x_j / (2 pi |x|^2). Kernels are sampled once per grid; the
/// solver is immutable afterwards and may be shared between threads.
class GaugeSolver {
 public:
  explicit GaugeSolver(const Grid& grid, GaugeOptions options = {});

  const Grid& grid() const noexcept { return grid_; }
  const Kernel& k1() const noexcept { return k1_; }
  const Kernel& k2() const noexcept { return k2_; }

  std::pair<Field, Field> compute_A12(const Field& u) const;
  Field compute_A0(const Field& u, const Field& A1, const Field& A2) const;
  GaugeSet compute(const Field& u) const;

  // Directional derivative of (A0, A1, A2) at u along v.
  GaugeVariation linearize(const Field& u, const Field& v, const GaugeSet& at_u) const;

 private:
  Grid grid_;
  Kernel k1_;
  Kernel k2_;
  double k1_sign_ = 1.0;

  Field conv1(const Field& rho) const;
  Field conv2(const Field& rho) const { return convolve(k2_, rho); }
};

GaugeResiduals gauge_residuals(const GaugeSet& g, const Field& u);

/// Ratios |A_j^2|_t / |u|_{2r}^2, j = 1, 2, for the exponent pair (r, t)
/// with 1/t = 1/r - 1/2.
struct LebesgueRatio {
  double r = 4.0 / 3.0;
  double t = 4.0;
  double a1 = 0.0;
  double a2 = 0.0;
};
LebesgueRatio gauge_lebesgue_ratio(const GaugeSet& g, const Field& u, double r = 4.0 / 3.0);

}  // namespace css
