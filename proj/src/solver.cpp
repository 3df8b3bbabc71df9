#include "css/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include <Eigen/Dense>
#include <spdlog/spdlog.h>

#include "css/krylov.hpp"
#include "css/sampling.hpp"

namespace css {

const char* to_string(SolverMethod m) noexcept {
  switch (m) {
    case SolverMethod::residual_min: return "residual_min";
    case SolverMethod::mountain_pass: return "mountain_pass";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  if (!(grad_tol > 0.0)) fail(ErrorKind::usage, "solver.grad_tol must be positive");
  if (!(delta0 > 0.0)) fail(ErrorKind::usage, "solver.delta0 must be positive");
  if (path_nodes < 5) fail(ErrorKind::usage, "solver.path_nodes must be >= 5");
  if (max_iters < 1) fail(ErrorKind::usage, "solver.max_iters must be >= 1");
  if (max_restarts < 0) fail(ErrorKind::usage, "solver restarts must be >= 0");
  if (!(seed_amplitude > 0.0) || !(seed_width > 0.0))
    fail(ErrorKind::usage, "solver seed amplitude and width must be positive");
  if (!(descent_level > 0.0)) fail(ErrorKind::usage, "solver.descent_level must be positive");
}

// ---------------------------------------------------------------------------
// Ray profile

RayProfile::RayProfile(const Functional& phi, const Field& v)
    : phi_(&phi), v_(interior_part(v)) {
  q_ = phi.op().quadratic_energy(v_);
  n_ = Functional::gauge_energy(phi.gauge_solver().compute(v_), v_);
}

double RayProfile::value(double s) const {
  const double s2 = s * s;
  return s2 * q_ + s2 * s2 * s2 * n_ - phi_->potential_integral(v_ * s);
}

double RayProfile::derivative(double s) const {
  const double s2 = s * s;
  return 2.0 * s * q_ + 6.0 * s2 * s2 * s * n_ - inner(phi_->nonlinearity(v_ * s), v_);
}

double RayProfile::argmax() const {
  if (!(q_ > 0.0)) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (derivative(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e8) return std::numeric_limits<double>::infinity();
  }
  for (int k = 0; k < 200 && hi - lo > 1e-15 * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    (derivative(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Shared evaluation state

namespace {

struct State {
  Field u;
  GaugeSet gauge;
  Field g;
  double phi = 0.0;
  double residual = 0.0;
};

State evaluate(const Functional& phi, const Field& u_in) {
  Field u = interior_part(u_in);
  require_finite(u, "solver iterate");
  GaugeSet gauge = phi.gauge_solver().compute(u);
  Field g = phi.gradient(u, gauge);
  const double value =
      phi.op().quadratic_energy(u) + Functional::gauge_energy(gauge, u) - phi.potential_integral(u);
  const double r = l2_norm(g);
  return State{std::move(u), std::move(gauge), std::move(g), value, r};
}

HistoryRow make_row(const Functional& phi, const State& s, int iter, const char* stage) {
  const Projection p = project(phi.split(), s.u);
  const SplitNorms n = equivalent_norm_sq(phi.split(), p.minus, p.plus);
  return HistoryRow{iter, s.phi, s.residual, std::sqrt(n.minus_sq), std::sqrt(n.plus_sq), stage};
}

double row_norm(const HistoryRow& r) { return std::hypot(r.norm_minus, r.norm_plus); }

CriticalPointResult finish(const Functional& phi, const SolverConfig& cfg, State s, int iterations,
                           int restarts, std::vector<HistoryRow> history, const char* method) {
  CriticalPointResult out{Field(phi.grid())};
  const HistoryRow last = make_row(phi, s, iterations, "final");
  out.phi = s.phi;
  out.residual = s.residual;
  out.iterations = iterations;
  out.restarts = restarts;
  out.history = std::move(history);
  out.norm = row_norm(last);
  out.negative_part_norm = last.norm_minus;
  out.positive_part_norm = last.norm_plus;
  out.nontrivial = out.norm >= cfg.delta0 && out.residual <= cfg.grad_tol;
  out.boundary_mass_fraction = boundary_mass_fraction(s.u);
  if (out.boundary_mass_fraction > 1e-6)
    spdlog::warn("solution carries {:.3g} of its mass within 10% of the walls; enlarge domain.L",
                 out.boundary_mass_fraction);
  out.u = std::move(s.u);
  out.method = method;
  return out;
}

enum class Outcome { converged, collapsed, stalled, budget, diverged };

struct Run {
  State state;
  Outcome outcome;
};

// Preconditioned descent restricted to the ray maxima {t v : t = argmax}. Phi
// decreases on every accepted step; runs only while the quadratic form is
// positive definite, where every ray has an interior maximum.
Run nehari_descent(const Functional& phi, const SolverConfig& cfg, const DirichletPreconditioner& P,
                   State s, int& iter, std::vector<HistoryRow>& history) {
  double tau = 0.5;
  std::optional<Field> prev_u, prev_d;
  while (true) {
    if (s.residual <= cfg.handoff_tol || s.residual <= cfg.grad_tol) return {std::move(s), Outcome::converged};
    if (iter >= cfg.max_iters) return {std::move(s), Outcome::budget};
    Field d = P.apply(s.g);
    if (prev_u) {
      // Barzilai-Borwein step on the preconditioned gradient map.
      const Field sk = s.u - *prev_u;
      const Field yk = d - *prev_d;
      const double sy = inner(sk, yk);
      tau = sy > 0.0 ? std::clamp(inner(sk, sk) / sy, 1e-3, 2.0) : 1e-3;
    }
    bool accepted = false;
    for (double t = tau; t >= 1e-3 * 0.999; t *= 0.5) {
      Field cand = s.u - d * t;
      const double scale = RayProfile(phi, cand).argmax();
      if (!(scale > 0.0) || !std::isfinite(scale)) continue;
      cand *= scale;
      State next = evaluate(phi, cand);
      if (next.phi < s.phi) {
        prev_u = s.u;
        prev_d = std::move(d);
        s = std::move(next);
        accepted = true;
        break;
      }
    }
    ++iter;
    history.push_back(make_row(phi, s, iter, "descent"));
    if (row_norm(history.back()) < cfg.delta0) return {std::move(s), Outcome::collapsed};
    if (!accepted) return {std::move(s), Outcome::stalled};
  }
}

// Newton-MINRES on the merit 1/2 ||g||^2 with Armijo backtracking; the merit
// never increases across accepted steps.
Run newton_merit(const Functional& phi, const SolverConfig& cfg, const DirichletPreconditioner& P, State s,
                 int& iter, std::vector<HistoryRow>& history, const char* stage) {
  const LinearMap M = [&P](const Field& r) { return P.apply(r); };
  int stalls = 0;
  while (true) {
    if (s.residual <= cfg.grad_tol) return {std::move(s), Outcome::converged};
    if (iter >= cfg.max_iters) return {std::move(s), Outcome::budget};
    const LinearMap J = [&](const Field& v) { return phi.hessian_apply(s.u, s.gauge, v); };
    const double rtol = s.residual > 1e-3 ? 1e-2 : 1e-8;
    const MinresResult lin = minres(J, s.g, M, rtol, 400);
    const double m0 = 0.5 * s.residual * s.residual;
    bool accepted = false;
    for (double t = 1.0; t >= 1e-3 * 0.999; t *= 0.5) {
      State next = evaluate(phi, s.u - lin.x * t);
      const double m = 0.5 * next.residual * next.residual;
      if (m < (1.0 - 1e-4 * t) * m0) {
        s = std::move(next);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // Fallback: short step along the preconditioned merit gradient J g.
      const Field dm = P.apply(phi.hessian_apply(s.u, s.gauge, s.g));
      State next = evaluate(phi, s.u - dm * 1e-3);
      if (next.residual <= s.residual) {
        s = std::move(next);
        accepted = true;
      }
    }
    ++iter;
    history.push_back(make_row(phi, s, iter, stage));
    if (row_norm(history.back()) < cfg.delta0) return {std::move(s), Outcome::collapsed};
    if (!accepted || history.back().residual > 0.999 * std::sqrt(2.0 * m0)) {
      if (++stalls >= 5 || !accepted) return {std::move(s), Outcome::stalled};
    } else {
      stalls = 0;
    }
  }
}

const char* describe(Outcome o) {
  switch (o) {
    case Outcome::converged: return "converged";
    case Outcome::collapsed: return "collapsed to the trivial solution";
    case Outcome::stalled: return "stalled";
    case Outcome::budget: return "exhausted solver.max_iters";
    case Outcome::diverged: return "diverged";
  }
  return "unknown";
}

}  // namespace

CriticalPointResult residual_minimize(const Functional& phi, const SolverConfig& cfg, const Field& start) {
  cfg.validate();
  require_same_grid(start, Field(phi.grid()), "residual_minimize");
  require_finite(start, "residual_minimize start");
  const DirichletPreconditioner P(phi.grid());
  std::vector<HistoryRow> history;
  int iter = 0;
  Outcome last = Outcome::collapsed;

  for (int attempt = 0; attempt <= cfg.max_restarts; ++attempt) {
    // Restart k uses the configured seed scaled by 2^(k-1).
    const Field u0 = attempt == 0 ? interior_part(start)
                                  : gaussian(phi.grid(), cfg.seed_amplitude * std::ldexp(1.0, attempt - 1),
                                             cfg.seed_width);
    try {
      State s = evaluate(phi, u0);
      history.push_back(make_row(phi, s, iter, "start"));
      if (row_norm(history.back()) < cfg.delta0) {
        last = Outcome::collapsed;
        spdlog::info("attempt {}: start below delta0, restarting", attempt);
        continue;
      }
      if (s.residual <= cfg.grad_tol)
        return finish(phi, cfg, std::move(s), iter, attempt, std::move(history), "residual_min");

      if (phi.split().ell() == 0) {
        const double t = RayProfile(phi, s.u).argmax();
        if (t > 0.0 && std::isfinite(t)) {
          Run a = nehari_descent(phi, cfg, P, evaluate(phi, s.u * t), iter, history);
          last = a.outcome;
          if (a.outcome == Outcome::collapsed || a.outcome == Outcome::budget) continue;
          s = std::move(a.state);
        }
      }
      Run b = newton_merit(phi, cfg, P, std::move(s), iter, history, "newton");
      last = b.outcome;
      if (b.outcome == Outcome::converged)
        return finish(phi, cfg, std::move(b.state), iter, attempt, std::move(history), "residual_min");
      spdlog::info("attempt {}: {} at residual {:.3e}", attempt, describe(b.outcome), b.state.residual);
      if (b.outcome == Outcome::budget) break;
    } catch (const Error& err) {
      // A blown-up iterate ends this attempt; the next restart starts afresh.
      if (err.kind() != ErrorKind::numeric) throw;
      spdlog::info("attempt {}: {}", attempt, err.what());
      last = Outcome::diverged;
    }
  }
  throw ConvergenceFailure(std::string("residual_minimize: ") + describe(last) + " after restarts",
                           std::move(history));
}

// ---------------------------------------------------------------------------
// Mountain pass

namespace {

// Removes the X- component of d and reflects it: descent on X+, ascent on X-.
Field reflect_minus(const SpectralSplit& split, Field d) {
  const Projection p = project(split, d);
  return p.plus - p.minus;
}

// Newton steps on the X- coefficients of u toward the maximum of Phi over
// u + X-; the reduced Hessian there is negative definite near the saddle.
Field maximize_minus(const Functional& phi, Field u, int steps) {
  const auto& phis = phi.split().eigenfields();
  const std::size_t l = phis.size();
  for (int it = 0; it < steps; ++it) {
    const State s = evaluate(phi, u);
    Eigen::VectorXd grad(static_cast<Eigen::Index>(l));
    Eigen::MatrixXd hess(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(l));
    for (std::size_t j = 0; j < l; ++j) {
      grad[static_cast<Eigen::Index>(j)] = inner(s.g, phis[j]);
      const Field hj = phi.hessian_apply(s.u, s.gauge, phis[j]);
      for (std::size_t i = 0; i < l; ++i)
        hess(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = inner(hj, phis[i]);
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (hess + hess.transpose()));
    if (es.eigenvalues().maxCoeff() >= 0.0) break;  // not locally concave along X-
    const Eigen::VectorXd dc = hess.ldlt().solve(grad);
    for (std::size_t j = 0; j < l; ++j) u.axpy(-dc[static_cast<Eigen::Index>(j)], phis[j]);
    if (dc.norm() < 1e-10) break;
  }
  return u;
}

// Equal-arc-length redistribution of path[first..last], endpoints fixed.
void respace(std::vector<Field>& path, std::size_t first, std::size_t last) {
  if (last <= first + 1) return;
  const std::size_t m = last - first;
  std::vector<double> arc(m + 1, 0.0);
  for (std::size_t k = 1; k <= m; ++k) arc[k] = arc[k - 1] + l2_norm(path[first + k] - path[first + k - 1]);
  std::vector<Field> moved;
  std::size_t seg = 0;
  for (std::size_t k = 1; k < m; ++k) {
    const double target = arc[m] * static_cast<double>(k) / static_cast<double>(m);
    while (seg + 1 < m && arc[seg + 1] < target) ++seg;
    const double len = arc[seg + 1] - arc[seg];
    const double w = len > 0.0 ? (target - arc[seg]) / len : 0.0;
    moved.push_back(path[first + seg] * (1.0 - w) + path[first + seg + 1] * w);
  }
  for (std::size_t k = 1; k < m; ++k) path[first + k] = std::move(moved[k - 1]);
}

}  // namespace

// Climbing-image string: interior nodes follow the preconditioned descent
// direction (with the X- component reversed when ell > 0), the highest node
// additionally climbs along the path tangent, and the two sides of the
// climbing node are re-spaced independently.
CriticalPointResult mountain_pass(const Functional& phi, const SolverConfig& cfg, const Field& endpoint) {
  cfg.validate();
  require_same_grid(endpoint, Field(phi.grid()), "mountain_pass");
  const Field e = interior_part(endpoint);
  const double phi_e = phi.value(e);
  if (!(phi_e < 0.0))
    fail(ErrorKind::usage, "mountain_pass: endpoint energy " + std::to_string(phi_e) + " is not below 0");

  const DirichletPreconditioner P(phi.grid());
  const bool definite = phi.split().ell() == 0;
  const std::size_t m = static_cast<std::size_t>(cfg.path_nodes - 1);
  std::vector<Field> path;
  for (std::size_t k = 0; k <= m; ++k) path.push_back(e * (static_cast<double>(k) / static_cast<double>(m)));

  std::vector<HistoryRow> history;
  int iter = 0;
  double tau = 0.5;
  double best_residual = std::numeric_limits<double>::infinity();
  int since_best = 0;
  std::optional<State> top;

  try {
    while (iter < cfg.max_iters) {
      std::vector<State> states;
      states.reserve(m - 1);
      for (std::size_t k = 1; k < m; ++k) states.push_back(evaluate(phi, path[k]));
      // Highest interior node; the lower index wins ties.
      std::size_t c = 0;
      for (std::size_t k = 1; k < states.size(); ++k)
        if (states[k].phi > states[c].phi) c = k;
      const std::size_t kc = c + 1;
      if (!definite) {
        path[kc] = maximize_minus(phi, path[kc], 3);
        states[c] = evaluate(phi, path[kc]);
      }
      State& s = states[c];
      ++iter;
      history.push_back(make_row(phi, s, iter, "path"));
      if (s.residual <= cfg.grad_tol)
        return finish(phi, cfg, std::move(s), iter, 0, std::move(history), "mountain_pass");
      if (s.residual <= cfg.handoff_tol) {
        top = std::move(s);
        break;
      }
      if (s.residual < 0.99 * best_residual) {
        best_residual = s.residual;
        since_best = 0;
      } else if (++since_best >= 25) {
        top = std::move(s);
        break;
      } else if (since_best % 5 == 0) {
        tau = std::max(0.5 * tau, 1e-3);
      }

      Field tangent = path[kc + 1] - path[kc - 1];
      tangent *= 1.0 / std::max(l2_norm(tangent), 1e-300);
      double mean_segment = 0.0;
      for (std::size_t k = 0; k < m; ++k) mean_segment += l2_norm(path[k + 1] - path[k]) / static_cast<double>(m);
      for (std::size_t k = 1; k < m; ++k) {
        Field d = P.apply(states[k - 1].g);
        if (!definite) d = reflect_minus(phi.split(), std::move(d));
        if (k == kc) d.axpy(-2.0 * inner(d, tangent), tangent);
        // No node moves further than half a segment per sweep.
        const double len = l2_norm(d);
        const double step = len > 0.0 ? std::min(tau, 0.5 * mean_segment / len) : 0.0;
        path[k].axpy(-step, d);
      }
      respace(path, 0, kc);
      respace(path, kc, m);
    }
    if (!top) {
      std::size_t kc = 1;
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 1; k < m; ++k) {
        const double v = phi.value(path[k]);
        if (v > best) {
          best = v;
          kc = k;
        }
      }
      top = evaluate(phi, path[kc]);
    }

    // Polish the saddle candidate with the merit Newton iteration.
    SolverConfig polish = cfg;
    polish.max_iters = iter + std::max(cfg.max_iters / 2, 50);
    Run r = newton_merit(phi, polish, P, std::move(*top), iter, history, "newton");
    if (r.outcome == Outcome::converged)
      return finish(phi, cfg, std::move(r.state), iter, 0, std::move(history), "mountain_pass");
    throw ConvergenceFailure(std::string("mountain_pass: ") + describe(r.outcome) + " at residual " +
                                 std::to_string(r.state.residual),
                             std::move(history));
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::numeric) throw;
    throw ConvergenceFailure(std::string("mountain_pass: diverged: ") + err.what(), std::move(history));
  }
}

// ---------------------------------------------------------------------------
// Landscape diagnostics

DescentScale find_descent_scale(const Functional& phi, const Field& v, double A) {
  if (!(A > 0.0)) fail(ErrorKind::usage, "find_descent_scale: A must be positive");
  if (interior_part(v).max_abs() == 0.0) fail(ErrorKind::usage, "find_descent_scale: v is zero");
  const RayProfile ray(phi, v);
  double lo = 0.0, hi = 1.0;
  std::vector<RaySample> witness;
  if (ray.value(hi) <= -A) {
    // Shrink until above the level; Phi(0) = 0 > -A guarantees termination.
    while (ray.value(hi * 0.5) <= -A && hi > 1e-300) hi *= 0.5;
    lo = hi * 0.5;
  } else {
    while (true) {
      const double val = ray.value(hi);
      witness.push_back({hi, val});
      if (val <= -A) break;
      lo = hi;
      hi *= 2.0;
      if (hi > 1e6) {
        throw GrowthFailure(
            "no s <= 1e6 with Phi(s v) <= -A: the growth condition F(x,t)/t^6 -> infinity fails for this "
            "model along v",
            std::move(witness));
      }
    }
  }
  double s = hi;
  for (int k = 0; k < 400; ++k) {
    s = 0.5 * (lo + hi);
    const double val = ray.value(s);
    if (std::abs(val + A) <= 1e-8 * A) break;
    (val > -A ? lo : hi) = s;
  }
  DescentScale out;
  out.s = s;
  out.phi = ray.value(s);
  out.ray_derivative = s * ray.derivative(s);
  out.monotone = out.ray_derivative < 0.0;
  if (std::abs(out.phi + A) > 1e-8 * A)
    fail(ErrorKind::numeric, "find_descent_scale: bisection did not reach the level");
  return out;
}

Field unit_positive_direction(const Functional& phi, const Field& v) {
  const Field plus = project(phi.split(), interior_part(v)).plus;
  const double n = std::sqrt(equivalent_norm_sq(phi.split(), plus));
  if (!(n > 0.0)) fail(ErrorKind::usage, "direction has no X+ component");
  return plus * (1.0 / n);
}

LinkingReport local_linking_probe(const Functional& phi, double epsilon, int sample_count, std::uint64_t seed) {
  if (!(epsilon > 0.0)) fail(ErrorKind::usage, "local_linking_probe: epsilon must be positive");
  if (sample_count < 1) fail(ErrorKind::usage, "local_linking_probe: need at least one sample");
  const SpectralSplit& split = phi.split();
  const int ell = split.ell();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;

  std::vector<Field> minus_dirs, plus_dirs;
  for (int k = 0; k < sample_count; ++k) {
    plus_dirs.push_back(unit_positive_direction(phi, random_bumps(phi.grid(), rng)));
    if (ell > 0) {
      Field u(phi.grid());
      double nsq = 0.0;
      for (int j = 0; j < ell; ++j) {
        const double c = normal(rng);
        u.axpy(c, split.eigenfields()[static_cast<std::size_t>(j)]);
        nsq += std::abs(split.computed_eigenvalues()[static_cast<std::size_t>(j)]) * c * c;
      }
      minus_dirs.push_back(u * (1.0 / std::sqrt(nsq)));
    }
  }

  LinkingReport report;
  report.ell = ell;
  for (double eps : {epsilon, epsilon / 2.0, epsilon / 4.0}) {
    LinkingLevel lv;
    lv.epsilon = eps;
    const double half = 0.5 * eps * eps;
    lv.plus.applicable = true;
    lv.plus.epsilon = eps;
    lv.plus.extreme_phi = std::numeric_limits<double>::infinity();
    for (const Field& d : plus_dirs) {
      const double v = phi.value(d * eps);
      lv.plus.extreme_phi = std::min(lv.plus.extreme_phi, v);
      lv.plus.max_relative_gap = std::max(lv.plus.max_relative_gap, std::abs(v - half) / (eps * eps));
    }
    lv.minus.epsilon = eps;
    if (ell > 0) {
      lv.minus.applicable = true;
      lv.minus.extreme_phi = -std::numeric_limits<double>::infinity();
      for (const Field& d : minus_dirs) {
        const double v = phi.value(d * eps);
        lv.minus.extreme_phi = std::max(lv.minus.extreme_phi, v);
        lv.minus.max_relative_gap = std::max(lv.minus.max_relative_gap, std::abs(v + half) / (eps * eps));
      }
    }
    report.levels.push_back(lv);
  }
  return report;
}

RayScan ray_scan(const Functional& phi, const Field& v, double s_max, int samples, double A) {
  if (!(s_max > 0.0) || samples < 2) fail(ErrorKind::usage, "ray_scan: need s_max > 0 and >= 2 samples");
  if (interior_part(v).max_abs() == 0.0) fail(ErrorKind::usage, "ray_scan: v is zero");
  const RayProfile ray(phi, v);
  RayScan scan;
  int prev_sign = 0;
  for (int k = 0; k < samples; ++k) {
    RayRow row;
    row.s = s_max * k / (samples - 1);
    row.phi = k == 0 ? 0.0 : ray.value(row.s);
    row.derivative = k == 0 ? 0.0 : ray.derivative(row.s);
    row.flagged = row.phi <= -A && row.derivative >= 0.0;
    scan.flagged += row.flagged ? 1 : 0;
    const int sign = row.derivative > 0.0 ? 1 : (row.derivative < 0.0 ? -1 : 0);
    if (sign != 0) {
      if (prev_sign != 0 && sign != prev_sign) ++scan.sign_changes;
      prev_sign = sign;
    }
    scan.rows.push_back(row);
  }
  return scan;
}

double symmetry_defect(const Field& u) {
  const Grid& g = u.grid();
  const int n = g.points_per_side();
  double base = 0.0, d1 = 0.0, d2 = 0.0, dt = 0.0;
  for (int i = 1; i < n; ++i)
    for (int j = 1; j < n; ++j) {
      const double v = u.at(i, j);
      base += v * v;
      d1 += std::pow(v - u.at(n - i, j), 2);
      d2 += std::pow(v - u.at(i, n - j), 2);
      dt += std::pow(v - u.at(j, i), 2);
    }
  if (base == 0.0) return 0.0;
  return std::sqrt(std::max({d1, d2, dt}) / base);
}

double boundary_mass_fraction(const Field& u) {
  const Grid& g = u.grid();
  const int n = g.points_per_side();
  const double r0 = 0.9 * g.half_width();
  double total = 0.0, outer = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x1 = g.coordinate(i), x2 = g.coordinate(j);
      const double w = u.at(i, j) * u.at(i, j);
      total += w;
      if (x1 * x1 + x2 * x2 > r0 * r0) outer += w;
    }
  return total > 0.0 ? outer / total : 0.0;
}

}  // namespace css
