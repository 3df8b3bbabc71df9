#pragma once

#include <string>
#include <vector>

namespace css {

enum class NonlinearityKind { pure_power, log_enhanced, weighted_power };

const char* to_string(NonlinearityKind kind) noexcept;

struct ModelSpec {
  NonlinearityKind kind = NonlinearityKind::pure_power;
  double p = 8.0;      // exponent of the power families
  double gamma = 0.0;  // weight b(x) = (1 + |x|^2)^(-gamma)

  bool operator==(const ModelSpec&) const = default;
};

/// Growth bound |f(x,t)| <= coef * b(x) |t|^(s-1) satisfied by a model.
struct GrowthBound {
  double coef = 1.0;
  double s = 8.0;
};

/// Autonomous-in-t nonlinearity f(x,t) with antiderivative F(x,t).
///   pure_power:     F = b |t|^p / p
///   weighted_power: same with gamma > 0 required
///   log_enhanced:   F = b t^6 log(1 + t^2) / 6
class NonlinearityModel {
 public:
  explicit NonlinearityModel(const ModelSpec& spec);

  const ModelSpec& spec() const noexcept { return spec_; }
  double weight(double x1, double x2) const noexcept;

  double f(double x1, double x2, double t) const noexcept { return weight(x1, x2) * f_unit(t); }
  double F(double x1, double x2, double t) const noexcept { return weight(x1, x2) * F_unit(t); }
  double f_t(double x1, double x2, double t) const noexcept { return weight(x1, x2) * df_unit(t); }

  // The x-independent factors.
  double f_unit(double t) const noexcept;
  double F_unit(double t) const noexcept;
  double df_unit(double t) const noexcept;

  GrowthBound growth_bound() const noexcept;

 private:
  ModelSpec spec_;
};

// hypothesis-error for p < 6 or a weighted family without decay.
NonlinearityModel make_model(const ModelSpec& spec);

enum class Verdict { holds_on_samples, violated, not_applicable };
const char* to_string(Verdict v) noexcept;

struct Witness {
  double x1 = 0.0;
  double x2 = 0.0;
  double t = 0.0;
  double t2 = 0.0;  // second sample for pairwise conditions
};

struct HypothesisVerdict {
  std::string name;
  Verdict verdict = Verdict::not_applicable;
  Witness witness;
  std::string detail;
  std::size_t samples = 0;
};

struct IntegrabilityRow {
  double q = 0.0;
  double shell_ratio = 0.0;     // measured ratio of consecutive dyadic shells
  double analytic_ratio = 0.0;  // same ratio for the radial comparison integral
  bool summable = false;
};

struct HypothesisReport {
  std::vector<HypothesisVerdict> verdicts;
  std::vector<IntegrabilityRow> integrability;

  const HypothesisVerdict* find(const std::string& name) const;
};

struct Point {
  double x1 = 0.0;
  double x2 = 0.0;
};

/// 6F <= t f (+1e-12 |t f|) on every sample, and F(x,T)/T^6 strictly
/// increasing along the three largest T of t_grid.
HypothesisReport probe_f2(const NonlinearityModel& model, const std::vector<double>& t_grid,
                          const std::vector<Point>& x_samples);

/// Decay of sup_{0<|t|<=r} |f(x,t)/t| along x = (R, 0), the growth bound of
/// the model on a t sample, and Lebesgue integrability of the weight from
/// dyadic shells [R0 2^k, R0 2^(k+1)] inside radius_max.
HypothesisReport probe_f4_f5(const NonlinearityModel& model, double r, const std::vector<double>& radius_grid);

/// Sign of F near t = 0 against the alternative requiring F <= 0 there.
HypothesisVerdict probe_sign_near_zero(const NonlinearityModel& model, double delta = 1e-2);

}  // namespace css
