#pragma once

#include <cstdint>
#include <memory>

#include "css/gauge.hpp"
#include "css/model.hpp"
#include "css/schrodinger.hpp"

namespace css {

struct EnergyBreakdown {
  double quadratic = 0.0;         // 1/2 int |grad u|^2 + V u^2 (edge form)
  double gauge = 0.0;             // N(u) = 1/2 int (A1^2 + A2^2) u^2
  double potential_energy = 0.0;  // int F(x, u)
  double total = 0.0;             // quadratic + gauge - potential_energy
  double plus_sq = 0.0;           // ||u+||^2
  double minus_sq = 0.0;          // ||u-||^2
  double total_split = 0.0;       // (plus_sq - minus_sq)/2 + gauge - potential_energy
};

struct GradientReport {
  Field g;
  double residual = 0.0;  // ||g||_L2
  double pairing = 0.0;   // <g, u>
};

struct GaugeIdentity {
  double N = 0.0;
  double pairing = 0.0;  // int (A1^2 + A2^2) u^2 + A0 u^2
  double defect = 0.0;   // |pairing - 6N| / max(6N, 1e-30)
};

struct PairingCheck {
  double pairing = 0.0;   // <g, u>
  double expected = 0.0;  // ||u+||^2 - ||u-||^2 + 3 int |A|^2 u^2 - int f u
  double relative_gap = 0.0;
};

/// Phi(u) = Q(u) + N(u) - int F(x, u) on the Dirichlet box, with its
/// L2 gradient and Hessian action. Wall values of every input are ignored;
/// gradients vanish on the walls.
class Functional {
 public:
  Functional(std::shared_ptr<const SpectralSplit> split, NonlinearityModel model, GaugeOptions gauge = {});

  const Grid& grid() const noexcept { return grid_; }
  const SpectralSplit& split() const noexcept { return *split_; }
  const SchrodingerOperator& op() const noexcept { return split_->op(); }
  const GaugeSolver& gauge_solver() const noexcept { return gauge_; }
  const NonlinearityModel& model() const noexcept { return model_; }

  EnergyBreakdown energy(const Field& u) const;
  double value(const Field& u) const;
  GradientReport gradient(const Field& u) const;
  // Gradient reusing a gauge computed for interior_part(u).
  Field gradient(const Field& u, const GaugeSet& gauge) const;
  // Derivative of the gradient at u along v.
  Field hessian_apply(const Field& u, const GaugeSet& gauge, const Field& v) const;

  GaugeIdentity gauge_energy_identity(const Field& u) const;
  PairingCheck pairing_check(const Field& u) const;

  // Pointwise f(x, u), f_t(x, u), and int F(x, u).
  Field nonlinearity(const Field& u) const;
  Field nonlinearity_derivative(const Field& u) const;
  double potential_integral(const Field& u) const;
  // 1/2 int (A1^2 + A2^2) u^2 for a gauge built from u.
  static double gauge_energy(const GaugeSet& gauge, const Field& u);

 private:
  Grid grid_;
  std::shared_ptr<const SpectralSplit> split_;
  NonlinearityModel model_;
  GaugeSolver gauge_;
  Field weight_;  // b(x)
};

/// int (A1^2 + A2^2) u^2 / ||u||^6 with the equivalent norm.
double gauge_ratio(const Functional& phi, const Field& u);

struct ConstantProbe {
  double sup = 0.0;
  double min = 0.0;
  std::size_t samples = 0;
};
ConstantProbe a1_constant_probe(const Functional& phi, std::size_t sample_count, std::uint64_t seed);

}  // namespace css
