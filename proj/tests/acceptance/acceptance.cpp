// Runs the fifteen acceptance criteria at their pinned tolerances and prints
// one PASS/FAIL line per criterion. Exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <unistd.h>

#include "css/commands.hpp"
#include "css/solver.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace css;
using fixture::constant_potential;
using fixture::make_functional;
using fixture::well_potential;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  // Records one measured quantity against its bound.
  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!ok) detail += (detail.empty() ? "" : "; ") + ("violated: " + what);
  }
  void note(const std::string& what) {
    if (pass) detail += (detail.empty() ? "" : "; ") + what;
  }
};

std::string sci(double x) { return fmt::format("{:.3e}", x); }

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

double rel_field(const Field& a, const Field& b) { return (a - b).max_abs() / std::max(b.max_abs(), 1e-300); }

// Shared fixtures, built on first use.
const Functional& definite128() {
  static const auto phi = make_functional(12.0, 128, constant_potential());
  return *phi;
}
const Functional& well128() {
  static const auto phi = make_functional(12.0, 128, well_potential());
  return *phi;
}
const Functional& well256() {
  static const auto phi = make_functional(12.0, 256, well_potential());
  return *phi;
}
const Functional& definite256() {
  static const auto phi = make_functional(12.0, 256, constant_potential());
  return *phi;
}

Outcome convolution_oracle() {
  Outcome o;
  const Grid g(8.0, 32);
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  double worst = 0.0;
  for (auto quad : {KernelQuadrature::punctured, KernelQuadrature::corrected}) {
    const Kernel k1 = sample_kernel(KernelKind::k1, g, quad);
    const Kernel k2 = sample_kernel(KernelKind::k2, g, quad, k1.shared_convolver());
    for (int s = 0; s < 5; ++s) {
      const Field rho = Field::sample(g, [&](double, double) { return d(rng); });
      for (int c : {1, 2}) {
        const auto fast = fixture::values(convolve(c == 1 ? k1 : k2, rho));
        const auto slow = oracle::direct_convolution(c, 8.0, 32, fixture::values(rho),
                                                     quad == KernelQuadrature::corrected);
        worst = std::max(worst, fixture::max_abs_diff(fast, slow) / fixture::max_abs(slow));
      }
    }
  }
  o.require(worst <= 1e-10, "max relative gap " + sci(worst) + " > 1e-10");
  o.note("max relative gap " + sci(worst) + " over 2 kernels x 5 densities x 2 quadratures");
  return o;
}

double radial_error(int n) {
  const Grid g(12.0, n);
  const auto [a1, a2] = GaugeSolver(g).compute_A12(gaussian(g));
  const double mag = std::hypot(interpolate(a1, 1.0, 0.0), interpolate(a2, 1.0, 0.0));
  return rel(mag, oracle::gaussian_gauge_magnitude(1.0));
}

Outcome radial_gauge() {
  Outcome o;
  const double e128 = radial_error(128), e256 = radial_error(256);
  o.require(e256 <= 1e-3, "error at N=256 " + sci(e256) + " > 1e-3");
  o.require(e128 / e256 >= 3.5, "refinement ratio " + sci(e128 / e256) + " < 3.5");
  o.note("|A|(1) error " + sci(e128) + " -> " + sci(e256) + ", ratio " + fmt::format("{:.1f}", e128 / e256));
  return o;
}

Outcome gauge_constraints() {
  Outcome o;
  std::vector<GaugeResiduals> r;
  for (int n : {64, 128, 256}) {
    const Grid g(12.0, n);
    const Field u = gaussian(g);
    r.push_back(gauge_residuals(GaugeSolver(g).compute(u), u));
  }
  for (std::size_t k = 0; k + 1 < r.size(); ++k) {
    const double rc = r[k].coulomb / r[k + 1].coulomb, rl = r[k].curl / r[k + 1].curl;
    o.require(rc >= 3.5, "coulomb ratio " + sci(rc));
    o.require(rl >= 3.5, "curl ratio " + sci(rl));
    o.note(fmt::format("ratios coulomb {:.2f}, curl {:.2f}", rc, rl));
  }
  return o;
}

Outcome scaling_laws() {
  Outcome o;
  const Functional& phi = definite128();
  std::mt19937_64 rng(1004);
  double worst = 0.0;
  for (int k = 0; k < 3; ++k) {
    const Field u = random_bumps(phi.grid(), rng);
    const GaugeSet a = phi.gauge_solver().compute(u);
    const double n1 = Functional::gauge_energy(a, u);
    for (double s : {2.0, 5.0}) {
      const Field su = s * u;
      const GaugeSet b = phi.gauge_solver().compute(su);
      worst = std::max({worst, rel_field(b.A1, s * s * a.A1), rel_field(b.A2, s * s * a.A2),
                        rel_field(b.A0, std::pow(s, 4) * a.A0), rel(Functional::gauge_energy(b, su), std::pow(s, 6) * n1)});
    }
  }
  o.require(worst <= 1e-12, "max relative defect " + sci(worst));
  o.note("max relative defect " + sci(worst));
  return o;
}

Outcome six_n_identity() {
  Outcome o;
  const auto coarse = make_functional(12.0, 128, constant_potential());
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    std::mt19937_64 r256(2000 + k), r128(2000 + k);
    const double d256 = definite256().gauge_energy_identity(random_bumps(definite256().grid(), r256)).defect;
    const double d128 = coarse->gauge_energy_identity(random_bumps(coarse->grid(), r128)).defect;
    o.require(d256 <= 1e-2, "defect " + sci(d256) + " at N=256");
    // The discrete identity holds to round-off, so "decreasing" is read as
    // not increasing beyond round-off.
    o.require(d256 <= std::max(d128, 1e-10), "defect grew from " + sci(d128) + " to " + sci(d256));
    worst = std::max(worst, d256);
  }
  o.note("max defect at N=256 " + sci(worst) + " over 10 fields");
  return o;
}

Outcome pairing_identity() {
  Outcome o;
  const Functional& phi = well256();
  std::mt19937_64 rng(1006);
  double worst = phi.pairing_check(gaussian(phi.grid())).relative_gap;
  for (int k = 0; k < 5; ++k) worst = std::max(worst, phi.pairing_check(random_bumps(phi.grid(), rng)).relative_gap);
  o.require(worst <= 1e-2, "relative gap " + sci(worst));
  o.note("max relative gap " + sci(worst) + " at N=256, ell=" + std::to_string(phi.split().ell()));
  return o;
}

Outcome gradient_keystone() {
  Outcome o;
  const Functional& phi = well128();
  std::mt19937_64 rng(1007);
  double worst = 0.0, order_lo = INFINITY, order_hi = -INFINITY;
  for (int k = 0; k < 20; ++k) {
    const Field u = random_bumps(phi.grid(), rng), v = random_bumps(phi.grid(), rng);
    const double gv = inner(phi.gradient(u).g, v);
    auto fd = [&](double e) { return (phi.value(u + e * v) - phi.value(u - e * v)) / (2.0 * e); };
    worst = std::max(worst, std::abs(gv - fd(1e-5)) / (1.0 + std::abs(gv)));
    const double order = std::log2(std::abs(gv - fd(2e-2)) / std::abs(gv - fd(1e-2)));
    order_lo = std::min(order_lo, order);
    order_hi = std::max(order_hi, order);
  }
  o.require(worst <= 1e-5, "relative error " + sci(worst));
  o.require(order_lo >= 1.8 && order_hi <= 2.2, fmt::format("observed order in [{:.2f}, {:.2f}]", order_lo, order_hi));
  o.note(fmt::format("max relative error {} at eps=1e-5; order in [{:.3f}, {:.3f}]", sci(worst), order_lo, order_hi));
  return o;
}

Outcome energy_forms() {
  Outcome o;
  const Functional& phi = well128();
  std::mt19937_64 rng(1008);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Field u = random_bumps(phi.grid(), rng);
    const SplitNorms n = equivalent_norm_sq(phi.split(), project(phi.split(), u).minus, project(phi.split(), u).plus);
    const double direct = phi.op().quadratic_energy(u);
    worst = std::max(worst, std::abs(0.5 * (n.plus_sq - n.minus_sq) - direct) / (0.5 * (n.plus_sq + n.minus_sq)));
  }
  o.require(worst <= 1e-10, "relative defect " + sci(worst));
  o.note("max relative defect " + sci(worst) + " over 100 fields");
  return o;
}

Outcome spectral_split() {
  Outcome o;
  const Grid g64(12.0, 64);
  const auto s64 = fixture::make_split(g64, well_potential());
  o.require(s64->ell() >= 1, "well has no negative direction at N=64");
  if (s64->ell() >= 1) {
    const double dense = oracle::dense_lowest_eigenvalue(12.0, 64, [](double x, double y) {
      return 1.0 - 8.0 * std::exp(-(x * x + y * y));
    });
    const double gap = rel(s64->negative_eigenvalues()[0], dense);
    o.require(gap <= 1e-6, "lambda_1 relative gap " + sci(gap));
    o.note(fmt::format("lambda_1 = {:.10f} (dense {:.10f})", s64->negative_eigenvalues()[0], dense));
  }
  const int flat = definite128().split().ell();
  o.require(flat == 0, "V=1 gives ell=" + std::to_string(flat));
  const int e128 = well128().split().ell(), e256 = well256().split().ell();
  o.require(e128 == e256 && e128 >= 1, fmt::format("ell {} at N=128, {} at N=256", e128, e256));
  o.note(fmt::format("ell = {} at N=64/128/256, V=1 ell = {}", e128, flat));
  return o;
}

Outcome gauge_ratio_probe() {
  Outcome o;
  const Functional& phi = definite128();
  std::mt19937_64 rng(1010);
  double sup = 0.0, worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Field u = random_bumps(phi.grid(), rng);
    const double r = gauge_ratio(phi, u);
    o.require(std::isfinite(r) && r >= 0.0, "ratio " + sci(r));
    worst = std::max(worst, rel(gauge_ratio(phi, 7.0 * u), r));
    sup = std::max(sup, r);
  }
  o.require(worst <= 1e-10, "scale defect " + sci(worst));
  o.note("empirical sup " + sci(sup) + ", scale defect " + sci(worst));
  return o;
}

Outcome local_linking() {
  Outcome o;
  const LinkingReport r = local_linking_probe(well128(), 1e-2, 16, 1011);
  o.require(r.ell == 1, "fixture ell=" + std::to_string(r.ell));
  double worst = 0.0;
  for (const LinkingLevel& lv : r.levels) {
    if (lv.epsilon < 5e-3 * 0.999) continue;
    o.require(lv.minus.applicable && lv.minus.extreme_phi < 0.0, "max on X- sphere " + sci(lv.minus.extreme_phi));
    o.require(lv.plus.extreme_phi > 0.0, "min on X+ sphere " + sci(lv.plus.extreme_phi));
    o.require(lv.minus.max_relative_gap <= 0.05, "X- gap " + sci(lv.minus.max_relative_gap));
    o.require(lv.plus.max_relative_gap <= 0.05, "X+ gap " + sci(lv.plus.max_relative_gap));
    worst = std::max({worst, lv.minus.max_relative_gap, lv.plus.max_relative_gap});
  }
  o.note("max |Phi -/+ eps^2/2|/eps^2 = " + sci(worst) + " at eps in {1e-2, 5e-3}");
  return o;
}

Outcome ray_divergence() {
  Outcome o;
  const Functional& phi = definite128();
  std::mt19937_64 rng(1012);
  for (int k = 0; k < 10; ++k) {
    const Field v = unit_positive_direction(phi, random_bumps(phi.grid(), rng));
    const RayProfile ray(phi, v);
    bool reached = false;
    for (double s = 1.0; s <= 1e3 && !reached; s *= 1.25) reached = ray.value(s) < -1e3;
    o.require(reached, "ray " + std::to_string(k) + " stays above -1e3 for s <= 1e3");
  }
  ModelSpec six;
  six.p = 6.0;
  const auto p6 = make_functional(12.0, 64, constant_potential(), six);
  bool fired = false;
  try {
    find_descent_scale(*p6, unit_positive_direction(*p6, gaussian(p6->grid(), 1.0, 3.0)), 1.0);
  } catch (const GrowthFailure&) {
    fired = true;
  }
  o.require(fired, "p=6 found a descent scale");
  o.note("10/10 rays reach Phi < -1e3; p=6 raises growth-error");
  return o;
}

Outcome ray_scan_probe() {
  Outcome o;
  std::vector<ModelSpec> models(3);
  models[0].kind = NonlinearityKind::pure_power;
  models[1].kind = NonlinearityKind::log_enhanced;
  models[2].kind = NonlinearityKind::weighted_power;
  models[2].gamma = 1.0;
  int rows = 0, below = 0;
  for (const ModelSpec& m : models) {
    for (const auto& pot : {constant_potential(), well_potential()}) {
      const auto phi = make_functional(12.0, 64, pot, m);
      std::mt19937_64 rng(1013);
      for (int k = 0; k < 4; ++k) {
        const Field v = unit_positive_direction(*phi, random_bumps(phi->grid(), rng));
        const double s1 = find_descent_scale(*phi, v, 1.0).s;
        const RayScan scan = ray_scan(*phi, v, 3.0 * s1, 301, 1.0);
        o.require(scan.flagged == 0, fmt::format("{} flagged rows for {}", scan.flagged, to_string(m.kind)));
        rows += static_cast<int>(scan.rows.size());
        for (const RayRow& r : scan.rows) below += r.phi <= -1.0;
      }
    }
  }
  o.require(below > 0, "no scanned sample reached Phi <= -1");
  o.note(fmt::format("0 flagged of {} rows ({} with Phi <= -1), 3 models x 2 potentials", rows, below));
  return o;
}

Outcome solver_certificates() {
  Outcome o;
  SolverConfig rm;
  SolverConfig mp;
  mp.method = SolverMethod::mountain_pass;
  auto endpoint = [](const Functional& phi) {
    const Field v = unit_positive_direction(phi, gaussian(phi.grid(), 2.0));
    return find_descent_scale(phi, v, 1.0).s * v;
  };
  auto attempt = [&](const char* label, auto&& fn) -> std::optional<CriticalPointResult> {
    try {
      return fn();
    } catch (const Error& e) {
      o.require(false, std::string(label) + " threw: " + e.what());
      return std::nullopt;
    }
  };

  const Functional& a = definite128();
  const auto ra = attempt("(a) residual_min", [&] { return residual_minimize(a, rm, gaussian(a.grid(), 2.0)); });
  const auto ma = attempt("(a) mountain_pass", [&] { return mountain_pass(a, mp, endpoint(a)); });
  if (ra && ma) {
    o.require(ra->nontrivial && a.gradient(ra->u).residual <= 1e-6, "(a) residual_min residual " + sci(ra->residual));
    o.require(ma->nontrivial && a.gradient(ma->u).residual <= 1e-6, "(a) mountain_pass residual " + sci(ma->residual));
    o.require(rel(ma->phi, ra->phi) <= 1e-2, "(a) energies " + sci(ra->phi) + " vs " + sci(ma->phi));
    o.note(fmt::format("(a) Phi {:.10f} / {:.10f}, residuals {} / {}", ra->phi, ma->phi, sci(ra->residual),
                       sci(ma->residual)));
  }

  const Functional& b = well128();
  const auto rb = attempt("(b) residual_min", [&] { return residual_minimize(b, rm, gaussian(b.grid(), 2.0)); });
  const auto mb = attempt("(b) mountain_pass", [&] { return mountain_pass(b, mp, endpoint(b)); });
  for (const auto* r : {&rb, &mb}) {
    if (!*r) continue;
    const double res = b.gradient((*r)->u).residual;
    o.require(res <= 1e-5 && (*r)->norm >= 1e-3, "(b) " + (*r)->method + " residual " + sci(res));
    o.note(fmt::format("(b) {} Phi {:.10f}, residual {}, ||u|| {:.4f}", (*r)->method, (*r)->phi, sci(res), (*r)->norm));
  }

  double worst = 0.0;
  for (const auto* r : {&ra, &ma, &rb, &mb})
    if (*r) worst = std::max(worst, symmetry_defect((*r)->u));
  o.require(worst <= 1e-6, "(c) symmetry defect " + sci(worst));
  o.note("(c) max symmetry defect " + sci(worst));
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Outcome determinism() {
  Outcome o;
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / ("css_acceptance_" + std::to_string(::getpid()));
  RunConfig c = parse_config("domain.N = 128\nspectrum.k_max = 6\n");
  std::vector<fs::path> dirs = {root / "a", root / "b"};
  for (const auto& d : dirs) {
    c.out_dir = d.string();
    const CommandResult r = run_solve(c);
    o.require(r.exit_code == exit_ok, "solve exit " + std::to_string(r.exit_code));
  }
  int same = 0;
  for (const char* f : {"result.json", "history.csv", "u_star.f64raw", "manifest.json"}) {
    const std::string x = slurp(dirs[0] / f), y = slurp(dirs[1] / f);
    o.require(!x.empty() && x == y, std::string(f) + " differs");
    same += !x.empty() && x == y;
  }
  std::error_code ec;
  fs::remove_all(root, ec);
  o.note(std::to_string(same) + "/4 outputs byte-identical");
  return o;
}

}  // namespace

int main() {
  // Solver chatter goes to stderr; stdout carries only the verdict lines.
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"convolution oracle", convolution_oracle},
      {"radial gauge oracle", radial_gauge},
      {"gauge constraints", gauge_constraints},
      {"scaling laws", scaling_laws},
      {"6N identity", six_n_identity},
      {"derivative pairing", pairing_identity},
      {"gradient keystone", gradient_keystone},
      {"energy forms agree", energy_forms},
      {"spectral split", spectral_split},
      {"gauge ratio probe", gauge_ratio_probe},
      {"local linking", local_linking},
      {"ray divergence", ray_divergence},
      {"ray scan", ray_scan_probe},
      {"solver certificates", solver_certificates},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[k].run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !out.pass;
    std::printf("%s %2zu %-20s %s (%.1fs)\n", out.pass ? "PASS" : "FAIL", k + 1, criteria[k].name,
                out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
