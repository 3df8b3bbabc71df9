#include "css/functional.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "css/error.hpp"
#include "css/sampling.hpp"

namespace css {

Functional::Functional(std::shared_ptr<const SpectralSplit> split, NonlinearityModel model, GaugeOptions gauge)
    : grid_(split ? split->op().grid() : throw Error(ErrorKind::usage, "functional needs a split")),
      split_(std::move(split)),
      model_(std::move(model)),
      gauge_(grid_, gauge),
      weight_(Field::sample(grid_, [this](double x1, double x2) { return model_.weight(x1, x2); })) {}

Field Functional::nonlinearity(const Field& u) const {
  Field out(grid_);
  for (std::size_t k = 0; k < u.size(); ++k) out[k] = weight_[k] * model_.f_unit(u[k]);
  return out;
}

Field Functional::nonlinearity_derivative(const Field& u) const {
  Field out(grid_);
  for (std::size_t k = 0; k < u.size(); ++k) out[k] = weight_[k] * model_.df_unit(u[k]);
  return out;
}

double Functional::potential_integral(const Field& u) const {
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) s += weight_[k] * model_.F_unit(u[k]);
  return grid_.weight() * s;
}

double Functional::gauge_energy(const GaugeSet& g, const Field& u) {
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) s += (g.A1[k] * g.A1[k] + g.A2[k] * g.A2[k]) * u[k] * u[k];
  return 0.5 * u.grid().weight() * s;
}

EnergyBreakdown Functional::energy(const Field& u_in) const {
  if (!(u_in.grid() == grid_)) fail(ErrorKind::usage, "energy: grid mismatch");
  require_finite(u_in, "energy");
  const Field u = interior_part(u_in);
  EnergyBreakdown e;
  e.quadratic = op().quadratic_energy(u);
  e.gauge = gauge_energy(gauge_.compute(u), u);
  e.potential_energy = potential_integral(u);
  e.total = e.quadratic + e.gauge - e.potential_energy;
  const Projection p = project(*split_, u);
  const SplitNorms n = equivalent_norm_sq(*split_, p.minus, p.plus);
  e.plus_sq = n.plus_sq;
  e.minus_sq = n.minus_sq;
  e.total_split = 0.5 * (n.plus_sq - n.minus_sq) + e.gauge - e.potential_energy;
  if (!std::isfinite(e.total) || !std::isfinite(e.total_split))
    fail(ErrorKind::numeric, "energy: non-finite value");
  return e;
}

double Functional::value(const Field& u_in) const {
  if (!(u_in.grid() == grid_)) fail(ErrorKind::usage, "energy: grid mismatch");
  require_finite(u_in, "energy");
  const Field u = interior_part(u_in);
  const double v = op().quadratic_energy(u) + gauge_energy(gauge_.compute(u), u) - potential_integral(u);
  if (!std::isfinite(v)) fail(ErrorKind::numeric, "energy: non-finite value");
  return v;
}

Field Functional::gradient(const Field& u_in, const GaugeSet& g) const {
  const Field u = interior_part(u_in);
  Field out = op().apply(u);
  for (std::size_t k = 0; k < u.size(); ++k)
    out[k] += (g.A1[k] * g.A1[k] + g.A2[k] * g.A2[k] + g.A0[k]) * u[k] - weight_[k] * model_.f_unit(u[k]);
  out = interior_part(std::move(out));
  require_finite(out, "gradient");
  return out;
}

GradientReport Functional::gradient(const Field& u_in) const {
  if (!(u_in.grid() == grid_)) fail(ErrorKind::usage, "gradient: grid mismatch");
  require_finite(u_in, "gradient");
  const Field u = interior_part(u_in);
  Field g = gradient(u, gauge_.compute(u));
  const double r = l2_norm(g);
  const double pr = inner(g, u);
  return GradientReport{std::move(g), r, pr};
}

Field Functional::hessian_apply(const Field& u_in, const GaugeSet& g, const Field& v_in) const {
  const Field u = interior_part(u_in);
  const Field v = interior_part(v_in);
  const GaugeVariation d = gauge_.linearize(u, v, g);
  Field out = op().apply(v);
  for (std::size_t k = 0; k < u.size(); ++k) {
    out[k] += (g.A1[k] * g.A1[k] + g.A2[k] * g.A2[k] + g.A0[k]) * v[k] +
              2.0 * u[k] * (g.A1[k] * d.dA1[k] + g.A2[k] * d.dA2[k]) + u[k] * d.dA0[k] -
              weight_[k] * model_.df_unit(u[k]) * v[k];
  }
  return interior_part(std::move(out));
}

GaugeIdentity Functional::gauge_energy_identity(const Field& u_in) const {
  const Field u = interior_part(u_in);
  const GaugeSet g = gauge_.compute(u);
  GaugeIdentity out;
  out.N = gauge_energy(g, u);
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k)
    s += (g.A1[k] * g.A1[k] + g.A2[k] * g.A2[k] + g.A0[k]) * u[k] * u[k];
  out.pairing = grid_.weight() * s;
  out.defect = std::abs(out.pairing - 6.0 * out.N) / std::max(6.0 * out.N, 1e-30);
  return out;
}

PairingCheck Functional::pairing_check(const Field& u_in) const {
  const Field u = interior_part(u_in);
  const GaugeSet g = gauge_.compute(u);
  PairingCheck out;
  out.pairing = inner(gradient(u, g), u);
  const Projection p = project(*split_, u);
  const SplitNorms n = equivalent_norm_sq(*split_, p.minus, p.plus);
  out.expected = n.plus_sq - n.minus_sq + 3.0 * 2.0 * gauge_energy(g, u) - inner(nonlinearity(u), u);
  out.relative_gap = std::abs(out.pairing - out.expected) / std::max(std::abs(out.expected), 1e-30);
  return out;
}

double gauge_ratio(const Functional& phi, const Field& u_in) {
  const Field u = interior_part(u_in);
  const double num = 2.0 * Functional::gauge_energy(phi.gauge_solver().compute(u), u);
  const double nsq = equivalent_norm_sq(phi.split(), u);
  if (!(nsq > 0.0)) fail(ErrorKind::usage, "gauge ratio: zero field");
  return num / (nsq * nsq * nsq);
}

ConstantProbe a1_constant_probe(const Functional& phi, std::size_t sample_count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ConstantProbe out;
  out.min = INFINITY;
  for (std::size_t k = 0; k < sample_count; ++k) {
    const double r = gauge_ratio(phi, random_bumps(phi.grid(), rng));
    out.sup = std::max(out.sup, r);
    out.min = std::min(out.min, r);
    ++out.samples;
  }
  if (sample_count == 0) out.min = 0.0;
  return out;
}

}  // namespace css
