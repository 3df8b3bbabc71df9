#include "css/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <numbers>
#include <fstream>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "css/sampling.hpp"
#include "output.hpp"

namespace css {

using json = nlohmann::ordered_json;

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::usage:
    case ErrorKind::config:
    case ErrorKind::hypothesis:
    case ErrorKind::io: return exit_config_error;
    case ErrorKind::capacity:
    case ErrorKind::degeneracy: return exit_degenerate;
    case ErrorKind::numeric:
    case ErrorKind::growth:
    case ErrorKind::convergence: return exit_not_converged;
  }
  return exit_not_converged;
}

PotentialSpec resolve_potential(const RunConfig& c) {
  PotentialSpec p = c.potential;
  if (p.kind == PotentialKind::custom_table) {
    std::ifstream f(c.potential_table, std::ios::binary);
    if (!f) fail(ErrorKind::config, "potential.table: cannot read '" + c.potential_table + "'");
    std::vector<char> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    const std::size_t want = static_cast<std::size_t>(c.N) * static_cast<std::size_t>(c.N);
    if (bytes.size() != want * sizeof(double))
      fail(ErrorKind::config, "potential.table: expected " + std::to_string(want) + " doubles");
    p.table.resize(want);
    for (std::size_t k = 0; k < want; ++k) {
      unsigned char b[8];
      for (int j = 0; j < 8; ++j) b[j] = static_cast<unsigned char>(bytes[k * 8 + static_cast<std::size_t>(j)]);
      std::uint64_t bits = 0;
      for (int j = 7; j >= 0; --j) bits = (bits << 8) | b[j];
      std::memcpy(&p.table[k], &bits, 8);
    }
  }
  return p;
}

Problem build_problem(const RunConfig& c) {
  validate_config(c);
  Grid grid(c.L, c.N);
  auto op = std::make_shared<const SchrodingerOperator>(assemble(resolve_potential(c), grid));
  SplitOptions so;
  so.k_max = c.k_max;
  auto sp = std::make_shared<const SpectralSplit>(split(op, so));
  GaugeOptions go;
  go.flip_k1_sign = c.fault == Fault::kernel_sign;
  auto phi = std::make_shared<const Functional>(sp, make_model(c.model), go);
  return Problem{grid, std::move(sp), std::move(phi)};
}

namespace {

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// Files from an earlier run in the same directory would contradict this one.
void clear_outcome(detail::OutputDir& out) {
  for (const char* name : {"result.json", "history.csv", "u_star.f64raw", "error.json"}) out.remove(name);
}

json error_json(const Error& e) {
  json j;
  j["status"] = "error";
  j["error"] = to_string(e.kind());
  j["message"] = e.what();
  if (e.kind() == ErrorKind::growth) {
    j["condition"] = "F(x,t)/t^6 -> +infinity as |t| -> infinity";
    if (const auto* g = dynamic_cast<const GrowthFailure*>(&e)) {
      json w = json::array();
      for (const auto& r : g->witness()) w.push_back({{"s", r.s}, {"phi", r.phi}});
      j["witness"] = w;
    }
  }
  return j;
}

std::string g17(double x) { return fmt::format("{:.17g}", x); }

std::string history_csv(const std::vector<HistoryRow>& rows) {
  std::string s = "iter,phi,residual,norm_minus,norm_plus,stage\n";
  for (const auto& r : rows)
    s += fmt::format("{},{},{},{},{},{}\n", r.iter, g17(r.phi), g17(r.residual), g17(r.norm_minus),
                     g17(r.norm_plus), r.stage);
  return s;
}

std::string raw_field(const Field& u) {
  std::string bytes(u.size() * 8, '\0');
  for (std::size_t k = 0; k < u.size(); ++k) {
    std::uint64_t bits;
    const double value = u[k];
    std::memcpy(&bits, &value, 8);
    for (int j = 0; j < 8; ++j) bytes[k * 8 + static_cast<std::size_t>(j)] = static_cast<char>((bits >> (8 * j)) & 0xff);
  }
  return bytes;
}

bool wants(const RunConfig& c, const char* fmt_name) {
  return std::find(c.formats.begin(), c.formats.end(), fmt_name) != c.formats.end();
}

class Stopwatch {
 public:
  void mark(const std::string& stage) {
    const auto now = std::chrono::steady_clock::now();
    timings_[stage] = std::chrono::duration<double>(now - last_).count();
    last_ = now;
  }
  const json& timings() const { return timings_; }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
  json timings_ = json::object();
};

void write_manifest(detail::OutputDir& out, const RunConfig& c, const char* command, const Stopwatch& sw) {
  json m;
  m["artifact"] = "css";
  m["version"] = CSS_VERSION;
  m["command"] = command;
  // The output location does not change what is computed.
  RunConfig identity = c;
  identity.out_dir = "-";
  m["config_hash"] = detail::sha256_hex(serialize_config(identity));
  m["seed"] = c.seed;
  json files = json::object();
  for (const auto& [name, sum] : out.checksums()) files[name] = sum;
  m["files"] = files;
  // Wall-clock data varies run to run, so it lives outside the manifest.
  out.write("timings.json", dump(json{{"stages", sw.timings()}}));
  out.write("manifest.json", dump(m));
}

// ---------------------------------------------------------------------------
// Verification battery

struct Check {
  std::string name;
  double measured;
  double tolerance;
  std::string detail;
};

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

double max_rel_field(const Field& a, const Field& b) {
  const double scale = std::max(b.max_abs(), 1e-300);
  return (a - b).max_abs() / scale;
}

std::vector<Check> verification_checks(const RunConfig& c, const Problem& p) {
  const Functional& phi = *p.functional;
  const GaugeSolver& gs = phi.gauge_solver();
  const Grid& grid = p.grid;
  const double h2 = grid.weight();
  std::mt19937_64 rng(c.seed);
  std::vector<Check> checks;

  const Field gauss = gaussian(grid);
  {
    const Field e = Field::sample(grid, [](double x1, double x2) { return std::exp(-(x1 * x1 + x2 * x2)); });
    checks.push_back({"integrate_gaussian", rel(integrate(e), std::numbers::pi), 1e-6, "int exp(-|x|^2) against pi"});
  }
  {
    const Field a = random_bumps(grid, rng), b = random_bumps(grid, rng);
    const Field lhs = convolve(gs.k1(), a * 2.0 - b * 3.0);
    const Field rhs = convolve(gs.k1(), a) * 2.0 - convolve(gs.k1(), b) * 3.0;
    checks.push_back({"convolution_linearity", max_rel_field(lhs, rhs), 1e-12, "K1 * (2a - 3b)"});
  }
  const GaugeSet g = gs.compute(gauss);
  {
    const double a = std::hypot(interpolate(g.A1, 1.0, 0.0), interpolate(g.A2, 1.0, 0.0));
    const double exact = (1.0 - std::exp(-1.0)) / 4.0;
    checks.push_back({"radial_gauge_oracle", rel(a, exact), 1e-3, "|A|(1) against (1 - e^-1)/4"});
  }
  {
    const GaugeResiduals r = gauge_residuals(g, gauss);
    checks.push_back({"coulomb_gauge_residual", r.coulomb, h2, "||div A||_L2 against h^2"});
    checks.push_back({"curl_law_residual", r.curl, h2, "||curl A + u^2/2||_L2 against h^2"});
  }
  {
    const Field u = random_bumps(grid, rng);
    const GaugeSet g1 = gs.compute(u);
    double a12 = 0.0, a0 = 0.0, n6 = 0.0;
    for (double s : {2.0, 5.0}) {
      const GaugeSet gs_ = gs.compute(u * s);
      a12 = std::max({a12, max_rel_field(gs_.A1, g1.A1 * (s * s)), max_rel_field(gs_.A2, g1.A2 * (s * s))});
      a0 = std::max(a0, max_rel_field(gs_.A0, g1.A0 * std::pow(s, 4)));
      n6 = std::max(n6, rel(Functional::gauge_energy(gs_, u * s), Functional::gauge_energy(g1, u) * std::pow(s, 6)));
    }
    checks.push_back({"scaling_A12", a12, 1e-12, "A_j[s u] = s^2 A_j[u], s in {2, 5}"});
    checks.push_back({"scaling_A0", a0, 1e-12, "A0[s u] = s^4 A0[u], s in {2, 5}"});
    checks.push_back({"scaling_gauge_energy", n6, 1e-12, "N(s u) = s^6 N(u), s in {2, 5}"});
  }
  {
    double d = phi.gauge_energy_identity(gauss).defect;
    for (int k = 0; k < 3; ++k) d = std::max(d, phi.gauge_energy_identity(random_bumps(grid, rng)).defect);
    checks.push_back({"gauge_energy_identity", d, 1e-2, "|<N'(u),u> - 6N(u)| / 6N(u)"});
  }
  {
    double d = phi.pairing_check(gauss).relative_gap;
    d = std::max(d, phi.pairing_check(random_bumps(grid, rng)).relative_gap);
    checks.push_back({"derivative_pairing", d, 1e-2,
                      "<Phi'(u),u> against ||u+||^2 - ||u-||^2 + 3 int |A|^2 u^2 - int f u"});
  }
  {
    double worst = 0.0;
    const double eps = 1e-5;
    for (int k = 0; k < 3; ++k) {
      const Field u = random_bumps(grid, rng) * 0.7;
      const Field v = random_bumps(grid, rng);
      const double an = inner(phi.gradient(u).g, v);
      const double fd = (phi.value(u + v * eps) - phi.value(u - v * eps)) / (2.0 * eps);
      worst = std::max(worst, std::abs(an - fd) / (1.0 + std::abs(an)));
    }
    checks.push_back({"gradient_finite_difference", worst, 1e-5, "central difference at eps = 1e-5"});
  }
  {
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      const EnergyBreakdown e = phi.energy(random_bumps(grid, rng));
      const double scale = 0.5 * (e.plus_sq + e.minus_sq) + e.gauge + std::abs(e.potential_energy);
      worst = std::max(worst, std::abs(e.total - e.total_split) / scale);
    }
    checks.push_back({"energy_split_consistency", worst, 1e-10, "edge form against split form"});
  }
  {
    double inv = 0.0, neg = 0.0;
    for (int k = 0; k < 5; ++k) {
      const Field u = random_bumps(grid, rng);
      const double r = gauge_ratio(phi, u);
      inv = std::max(inv, rel(gauge_ratio(phi, u * 7.0), r));
      neg = std::max(neg, -r);
    }
    checks.push_back({"gauge_ratio_scale_invariance", inv, 1e-10, "ratio(7u) = ratio(u)"});
    checks.push_back({"gauge_ratio_nonnegative", std::max(neg, 0.0), 0.0, "int |A|^2 u^2 >= 0"});
  }
  {
    const Field u = random_bumps(grid, rng), v = random_bumps(grid, rng);
    const SchrodingerOperator& op = phi.op();
    const double d = std::abs(op.form(u, v) - op.form(v, u)) / (l2_norm(u) * l2_norm(v));
    checks.push_back({"operator_symmetry", d, 1e-12, "|<Hu,v> - <u,Hv>| / (|u||v|)"});
  }
  {
    const Field u = random_bumps(grid, rng);
    const Projection pr = project(*p.split, u);
    const Projection again = project(*p.split, pr.plus);
    const double d = l2_norm(again.minus) / std::max(l2_norm(u), 1e-300);
    checks.push_back({"projection_idempotence", d, 1e-10, "X- part of u+"});
  }
  return checks;
}

// Reports go to stdout, so diagnostics must not.
void route_logs_to_stderr() {
  static const bool done = [] {
    auto logger = spdlog::stderr_color_mt("css");
    spdlog::set_default_logger(logger);
    return true;
  }();
  (void)done;
}

template <class Fn>
CommandResult guarded(Fn&& fn) {
  route_logs_to_stderr();
  try {
    return fn();
  } catch (const Error& e) {
    spdlog::error("{}: {}", to_string(e.kind()), e.what());
    return {exit_code_for(e.kind()), dump(error_json(e))};
  }
}

}  // namespace

CommandResult run_verify(const RunConfig& c) {
  return guarded([&] {
    const Problem p = build_problem(c);
    const std::vector<Check> checks = verification_checks(c, p);
    json report;
    report["command"] = "verify";
    bool ok = true;
    json list = json::array();
    for (const auto& ch : checks) {
      const bool pass = std::isfinite(ch.measured) && ch.measured <= ch.tolerance;
      ok = ok && pass;
      list.push_back({{"name", ch.name}, {"measured", ch.measured}, {"tolerance", ch.tolerance},
                      {"passed", pass}, {"detail", ch.detail}});
    }
    report["status"] = ok ? "pass" : "fail";
    report["checks"] = list;
    return CommandResult{ok ? exit_ok : exit_verification_failed, dump(report)};
  });
}

CommandResult run_spectrum(const RunConfig& c) {
  return guarded([&] {
    validate_config(c);
    const Grid grid(c.L, c.N);
    auto op = std::make_shared<const SchrodingerOperator>(assemble(resolve_potential(c), grid));
    SplitOptions so;
    so.k_max = c.k_max;
    const SpectralSplit s = split(op, so);
    json j;
    j["ell"] = s.ell();
    j["lambdas"] = s.negative_eigenvalues();
    j["gap"] = s.gap();
    j["computed"] = s.computed_eigenvalues();
    return CommandResult{exit_ok, dump(j)};
  });
}

CommandResult run_solve(const RunConfig& c) {
  return guarded([&]() -> CommandResult {
    Stopwatch sw;
    const Problem p = build_problem(c);
    sw.mark("setup");
    detail::OutputDir out(c.out_dir);
    const Functional& phi = *p.functional;
    const Field seed = gaussian(p.grid, c.solver.seed_amplitude, c.solver.seed_width);
    CriticalPointResult r{Field(p.grid)};
    json extra = json::object();
    try {
      if (c.solver.method == SolverMethod::residual_min) {
        r = residual_minimize(phi, c.solver, seed);
      } else {
        const Field v = unit_positive_direction(phi, seed);
        const DescentScale ds = find_descent_scale(phi, v, c.solver.descent_level);
        extra["endpoint_scale"] = ds.s;
        extra["endpoint_phi"] = ds.phi;
        r = mountain_pass(phi, c.solver, v * ds.s);
      }
    } catch (const ConvergenceFailure& e) {
      clear_outcome(out);
      if (wants(c, "csv")) out.write("history.csv", history_csv(e.history()));
      const json err = error_json(e);
      out.write("error.json", dump(err));
      sw.mark("solve");
      write_manifest(out, c, "solve", sw);
      return {exit_not_converged, dump(err)};
    } catch (const Error& e) {
      clear_outcome(out);
      const json err = error_json(e);
      out.write("error.json", dump(err));
      sw.mark("solve");
      write_manifest(out, c, "solve", sw);
      return {exit_code_for(e.kind()), dump(err)};
    }
    sw.mark("solve");
    clear_outcome(out);
    json j;
    j["status"] = r.nontrivial ? "converged" : "trivial";
    j["L"] = c.L;
    j["N"] = c.N;
    j["phi"] = r.phi;
    j["residual"] = r.residual;
    j["grad_tol"] = c.solver.grad_tol;
    j["iterations"] = r.iterations;
    j["restarts"] = r.restarts;
    j["method"] = r.method;
    j["nontrivial"] = r.nontrivial;
    j["norm"] = r.norm;
    j["negative_part_norm"] = r.negative_part_norm;
    j["positive_part_norm"] = r.positive_part_norm;
    j["ell"] = p.split->ell();
    j["symmetry_defect"] = symmetry_defect(r.u);
    j["boundary_mass_fraction"] = r.boundary_mass_fraction;
    j["seed"] = c.seed;
    for (auto& [k, v] : extra.items()) j[k] = v;
    if (wants(c, "json")) out.write("result.json", dump(j));
    if (wants(c, "csv")) out.write("history.csv", history_csv(r.history));
    if (wants(c, "raw")) out.write("u_star.f64raw", raw_field(r.u));
    sw.mark("write");
    write_manifest(out, c, "solve", sw);
    return {r.nontrivial ? exit_ok : exit_not_converged, dump(j)};
  });
}

CommandResult run_landscape(const RunConfig& c) {
  return guarded([&] {
    Stopwatch sw;
    const Problem p = build_problem(c);
    detail::OutputDir out(c.out_dir);
    const Functional& phi = *p.functional;
    const Field seed = gaussian(p.grid, c.solver.seed_amplitude, c.solver.seed_width);
    const Field v = seed * (1.0 / std::sqrt(equivalent_norm_sq(*p.split, seed)));
    const RayScan scan = ray_scan(phi, v, c.landscape_s_max, c.landscape_samples, c.landscape_level);
    const LinkingReport link = local_linking_probe(phi, c.landscape_epsilon, 8, c.seed);
    sw.mark("scan");

    std::string csv = "s,phi,derivative,flagged\n";
    for (const auto& r : scan.rows)
      csv += fmt::format("{},{},{},{}\n", g17(r.s), g17(r.phi), g17(r.derivative), r.flagged ? 1 : 0);
    json lj;
    lj["ell"] = link.ell;
    json levels = json::array();
    for (const auto& lv : link.levels) {
      json minus;
      if (lv.minus.applicable)
        minus = {{"status", "sampled"}, {"max_phi", lv.minus.extreme_phi},
                 {"max_relative_gap", lv.minus.max_relative_gap}};
      else
        minus = {{"status", "not-applicable"}};
      json plus = {{"status", "sampled"}, {"min_phi", lv.plus.extreme_phi},
                   {"max_relative_gap", lv.plus.max_relative_gap}};
      levels.push_back({{"epsilon", lv.epsilon}, {"minus", minus}, {"plus", plus}});
    }
    lj["levels"] = levels;
    if (wants(c, "csv")) out.write("rayscan.csv", csv);
    if (wants(c, "json")) out.write("linking.json", dump(lj));
    sw.mark("write");
    write_manifest(out, c, "landscape", sw);

    json report;
    report["command"] = "landscape";
    report["ray"] = {{"samples", scan.rows.size()}, {"sign_changes", scan.sign_changes},
                     {"flagged", scan.flagged}, {"level", c.landscape_level}};
    report["linking"] = lj;
    return CommandResult{exit_ok, dump(report)};
  });
}

}  // namespace css
