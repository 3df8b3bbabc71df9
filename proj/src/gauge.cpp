#include "css/gauge.hpp"

#include <algorithm>
#include <cmath>

#include "css/error.hpp"

namespace css {

namespace {

double lp_norm(const Field& f, double p) {
  double s = 0.0;
  for (double v : f.values()) s += std::pow(std::abs(v), p);
  return std::pow(f.grid().weight() * s, 1.0 / p);
}

}  // namespace

GaugeSolver::GaugeSolver(const Grid& grid, GaugeOptions options)
    : grid_(grid),
      k1_(sample_kernel(KernelKind::k1, grid, options.quadrature,
                        std::make_shared<const FreeSpaceConvolver>(grid))),
      k2_(sample_kernel(KernelKind::k2, grid, options.quadrature, k1_.shared_convolver())),
      k1_sign_(options.flip_k1_sign ? -1.0 : 1.0) {}

Field GaugeSolver::conv1(const Field& rho) const {
  Field out = convolve(k1_, rho);
  if (k1_sign_ != 1.0) out *= k1_sign_;
  return out;
}

std::pair<Field, Field> GaugeSolver::compute_A12(const Field& u) const {
  if (!(u.grid() == grid_)) fail(ErrorKind::usage, "compute_A12: grid mismatch");
  require_finite(u, "compute_A12");
  Field rho = hadamard(u, u) * 0.5;
  return {conv2(rho), -conv1(rho)};
}

Field GaugeSolver::compute_A0(const Field& u, const Field& A1, const Field& A2) const {
  if (!(u.grid() == grid_)) fail(ErrorKind::usage, "compute_A0: grid mismatch");
  require_same_grid(u, A1, "compute_A0");
  require_same_grid(u, A2, "compute_A0");
  const Field u2 = hadamard(u, u);
  return conv1(hadamard(A2, u2)) - conv2(hadamard(A1, u2));
}

GaugeSet GaugeSolver::compute(const Field& u) const {
  auto [A1, A2] = compute_A12(u);
  Field A0 = compute_A0(u, A1, A2);
  Field rho = hadamard(u, u) * 0.5;
  const double m = 2.0 * integrate(rho);
  return GaugeSet{std::move(A0), std::move(A1), std::move(A2), std::move(rho), m};
}

GaugeVariation GaugeSolver::linearize(const Field& u, const Field& v, const GaugeSet& at) const {
  require_same_grid(u, v, "gauge linearization");
  const Field uv = hadamard(u, v);
  const Field u2 = hadamard(u, u);
  Field dA1 = conv2(uv);
  Field dA2 = -conv1(uv);
  // d(A2 u^2) = dA2 u^2 + 2 A2 u v, likewise for A1.
  Field s2 = hadamard(dA2, u2).axpy(2.0, hadamard(at.A2, uv));
  Field s1 = hadamard(dA1, u2).axpy(2.0, hadamard(at.A1, uv));
  Field dA0 = conv1(s2) - conv2(s1);
  return GaugeVariation{std::move(dA0), std::move(dA1), std::move(dA2)};
}

GaugeResiduals gauge_residuals(const GaugeSet& g, const Field& u) {
  auto [d1A1, d2A1] = gradient(g.A1);
  auto [d1A2, d2A2] = gradient(g.A2);
  Field div = d1A1 + d2A2;
  Field curl = d1A2 - d2A1;
  curl.axpy(0.5, hadamard(u, u));
  return GaugeResiduals{l2_norm(div), l2_norm(curl)};
}

LebesgueRatio gauge_lebesgue_ratio(const GaugeSet& g, const Field& u, double r) {
  if (!(r > 1.0 && r < 2.0)) fail(ErrorKind::usage, "Lebesgue ratio needs 1 < r < 2");
  LebesgueRatio out;
  out.r = r;
  out.t = 1.0 / (1.0 / r - 0.5);
  const double un = lp_norm(u, 2.0 * r);
  const double denom = std::max(un * un, 1e-300);
  out.a1 = lp_norm(hadamard(g.A1, g.A1), out.t) / denom;
  out.a2 = lp_norm(hadamard(g.A2, g.A2), out.t) / denom;
  return out;
}

}  // namespace css
