#include "css/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "css/error.hpp"

namespace css {

const char* to_string(NonlinearityKind kind) noexcept {
  switch (kind) {
    case NonlinearityKind::pure_power: return "pure_power";
    case NonlinearityKind::log_enhanced: return "log_enhanced";
    case NonlinearityKind::weighted_power: return "weighted_power";
  }
  return "unknown";
}

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::holds_on_samples: return "holds-on-samples";
    case Verdict::violated: return "violated";
    case Verdict::not_applicable: return "not-applicable";
  }
  return "unknown";
}

NonlinearityModel::NonlinearityModel(const ModelSpec& spec) : spec_(spec) {}

NonlinearityModel make_model(const ModelSpec& spec) {
  if (!(spec.gamma >= 0.0) || !std::isfinite(spec.gamma))
    fail(ErrorKind::usage, "nonlinearity.gamma must be finite and >= 0");
  if (spec.kind != NonlinearityKind::log_enhanced) {
    if (!std::isfinite(spec.p))
      fail(ErrorKind::usage, "nonlinearity.p must be finite");
    if (spec.p < 6.0)
      fail(ErrorKind::hypothesis, "power exponent p = " + std::to_string(spec.p) +
                                      " < 6: 6F <= t f cannot hold together with F/t^6 growth");
  }
  if (spec.kind == NonlinearityKind::weighted_power && !(spec.gamma > 0.0))
    fail(ErrorKind::hypothesis, "weighted_power needs gamma > 0 for spatial decay");
  return NonlinearityModel(spec);
}

double NonlinearityModel::weight(double x1, double x2) const noexcept {
  if (spec_.gamma == 0.0) return 1.0;
  return std::pow(1.0 + x1 * x1 + x2 * x2, -spec_.gamma);
}

double NonlinearityModel::f_unit(double t) const noexcept {
  const double a = std::abs(t);
  if (spec_.kind == NonlinearityKind::log_enhanced) {
    const double t2 = t * t;
    return std::pow(t, 5) * std::log1p(t2) + std::pow(t, 7) / (3.0 * (1.0 + t2));
  }
  if (a == 0.0) return 0.0;
  return std::pow(a, spec_.p - 2.0) * t;
}

double NonlinearityModel::F_unit(double t) const noexcept {
  if (spec_.kind == NonlinearityKind::log_enhanced) return std::pow(t, 6) * std::log1p(t * t) / 6.0;
  return std::pow(std::abs(t), spec_.p) / spec_.p;
}

double NonlinearityModel::df_unit(double t) const noexcept {
  if (spec_.kind == NonlinearityKind::log_enhanced) {
    const double t2 = t * t;
    const double t4 = t2 * t2, t6 = t4 * t2, t8 = t4 * t4;
    const double d = 1.0 + t2;
    return 5.0 * t4 * std::log1p(t2) + 2.0 * t6 / d + 7.0 * t6 / (3.0 * d) - 2.0 * t8 / (3.0 * d * d);
  }
  const double a = std::abs(t);
  if (a == 0.0) return spec_.p == 2.0 ? 1.0 : 0.0;
  return (spec_.p - 1.0) * std::pow(a, spec_.p - 2.0);
}

GrowthBound NonlinearityModel::growth_bound() const noexcept {
  // log(1 + t^2) <= t^2 and t^2 / (1 + t^2) <= 1 give |f| <= (4/3) b |t|^7.
  if (spec_.kind == NonlinearityKind::log_enhanced) return {4.0 / 3.0, 8.0};
  return {1.0, spec_.p};
}

const HypothesisVerdict* HypothesisReport::find(const std::string& name) const {
  for (const auto& v : verdicts)
    if (v.name == name) return &v;
  return nullptr;
}

HypothesisReport probe_f2(const NonlinearityModel& model, const std::vector<double>& t_grid,
                          const std::vector<Point>& x_samples) {
  for (double t : t_grid)
    if (t == 0.0) fail(ErrorKind::usage, "probe_f2: t grid must exclude 0");
  HypothesisReport report;
  HypothesisVerdict v{"f2", Verdict::holds_on_samples, {}, "", 0};

  for (const Point& x : x_samples) {
    for (double t : t_grid) {
      ++v.samples;
      const double tf = t * model.f(x.x1, x.x2, t);
      const double F6 = 6.0 * model.F(x.x1, x.x2, t);
      if (F6 > tf + 1e-12 * std::abs(tf)) {
        v.verdict = Verdict::violated;
        v.witness = {x.x1, x.x2, t, 0.0};
        v.detail = "6F exceeds t f";
        report.verdicts.push_back(v);
        return report;
      }
    }
  }

  std::vector<double> top;
  for (double t : t_grid) top.push_back(std::abs(t));
  std::sort(top.begin(), top.end());
  top.erase(std::unique(top.begin(), top.end()), top.end());
  if (top.size() >= 3) {
    top.erase(top.begin(), top.end() - 3);
    for (const Point& x : x_samples) {
      for (std::size_t k = 0; k + 1 < top.size(); ++k) {
        const double r0 = model.F(x.x1, x.x2, top[k]) / std::pow(top[k], 6);
        const double r1 = model.F(x.x1, x.x2, top[k + 1]) / std::pow(top[k + 1], 6);
        if (!(r1 > r0)) {
          v.verdict = Verdict::violated;
          v.witness = {x.x1, x.x2, top[k], top[k + 1]};
          v.detail = "F/t^6 not increasing for large t";
          report.verdicts.push_back(v);
          return report;
        }
      }
    }
  }
  report.verdicts.push_back(v);
  return report;
}

namespace {

// 2 pi int_{a}^{b} (1 + r^2)^(-g) r dr by composite Simpson.
double shell_integral(double g, double a, double b) {
  const int n = 2000;
  const double h = (b - a) / n;
  auto w = [g](double r) { return std::pow(1.0 + r * r, -g) * r; };
  double s = w(a) + w(b);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * w(a + k * h);
  return 2.0 * std::numbers::pi * s * h / 3.0;
}

}  // namespace

HypothesisReport probe_f4_f5(const NonlinearityModel& model, double r, const std::vector<double>& radius_grid) {
  if (!(r > 0.0)) fail(ErrorKind::usage, "probe_f4_f5: r must be positive");
  if (radius_grid.size() < 3) fail(ErrorKind::usage, "probe_f4_f5: need at least 3 radii");
  HypothesisReport report;

  // (f4): sup over 0 < |t| <= r of |f/t| must decay to 0 in |x|.
  const int nt = 200;
  std::vector<double> sups;
  for (double R : radius_grid) {
    double s = 0.0;
    for (int k = 1; k <= nt; ++k) {
      const double t = r * k / nt;
      s = std::max(s, std::abs(model.f(R, 0.0, t) / t));
    }
    sups.push_back(s);
  }
  HypothesisVerdict f4{"f4", Verdict::holds_on_samples, {}, "", radius_grid.size() * nt};
  for (std::size_t k = 0; k + 1 < sups.size(); ++k) {
    if (sups[k + 1] > sups[k]) {
      f4.verdict = Verdict::violated;
      f4.witness = {radius_grid[k + 1], 0.0, r, 0.0};
      f4.detail = "sup |f/t| increases with |x|";
    }
  }
  if (f4.verdict == Verdict::holds_on_samples) {
    const std::size_t last = sups.size() - 1, mid = sups.size() / 2;
    const double slope = (std::log(sups[last]) - std::log(sups[mid])) /
                         (std::log(radius_grid[last]) - std::log(radius_grid[mid]));
    f4.detail = "tail decay exponent " + std::to_string(slope);
    if (!(slope < -1e-3)) {
      f4.verdict = Verdict::violated;
      f4.witness = {radius_grid[last], 0.0, r, 0.0};
      f4.detail = "sup |f/t| does not decay with |x|";
    }
  }
  report.verdicts.push_back(f4);

  // (f5): |f| <= a|t| + b(x)|t|^(s-1) with the model's own a = 0, b, s.
  const GrowthBound gb = model.growth_bound();
  HypothesisVerdict f5{"f5", Verdict::holds_on_samples, {}, "", 0};
  f5.detail = "a = 0, s = " + std::to_string(gb.s) + ", coefficient " + std::to_string(gb.coef);
  for (double R : radius_grid) {
    for (int k = -40; k <= 40; ++k) {
      const double t = std::pow(10.0, k / 10.0);
      for (double sgn : {-1.0, 1.0}) {
        ++f5.samples;
        const double lhs = std::abs(model.f(R, 0.0, sgn * t));
        const double rhs = gb.coef * model.weight(R, 0.0) * std::pow(t, gb.s - 1.0);
        if (lhs > rhs * (1.0 + 1e-12)) {
          f5.verdict = Verdict::violated;
          f5.witness = {R, 0.0, sgn * t, 0.0};
        }
      }
    }
  }
  report.verdicts.push_back(f5);

  const double rmax = *std::max_element(radius_grid.begin(), radius_grid.end());
  const double g = model.spec().gamma;
  for (double q : {1.0, 1.5, 2.0, 4.0}) {
    IntegrabilityRow row;
    row.q = q;
    row.shell_ratio = shell_integral(g * q, rmax / 2.0, rmax) / shell_integral(g * q, rmax / 4.0, rmax / 2.0);
    row.analytic_ratio = std::pow(2.0, 2.0 - 2.0 * g * q);
    row.summable = row.shell_ratio < 0.95 && row.analytic_ratio < 1.0;
    report.integrability.push_back(row);
  }
  return report;
}

HypothesisVerdict probe_sign_near_zero(const NonlinearityModel& model, double delta) {
  HypothesisVerdict v{"f3-sign", Verdict::holds_on_samples, {}, "F <= 0 for |t| <= delta", 0};
  for (int k = 1; k <= 50; ++k) {
    const double t = delta * k / 50.0;
    ++v.samples;
    if (model.F(0.0, 0.0, t) > 0.0) {
      v.verdict = Verdict::violated;
      v.witness = {0.0, 0.0, t, 0.0};
      v.detail = "F > 0 near t = 0, so the sign alternative conflicts with 0 < 6F";
      break;
    }
  }
  return v;
}

}  // namespace css
