#include "css/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <fmt/format.h>

#include "css/error.hpp"

namespace css {

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  fail(ErrorKind::config, key + ": " + why);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) bad(key, "expected a finite number, got '" + v + "'");
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) bad(key, "expected an integer, got '" + v + "'");
  return out;
}

int to_int32(const std::string& key, const std::string& v) {
  const long long x = to_int(key, v);
  if (x < -2147483647LL || x > 2147483647LL) bad(key, "integer out of range");
  return static_cast<int>(x);
}

std::string num(double x) { return fmt::format("{:.17g}", x); }

struct Entry {
  const char* key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class E>
E pick(const std::string& key, const std::string& v, std::initializer_list<std::pair<const char*, E>> options) {
  std::string names;
  for (const auto& [name, value] : options) {
    if (v == name) return value;
    names += names.empty() ? name : std::string(", ") + name;
  }
  bad(key, "unknown value '" + v + "' (expected one of " + names + ")");
}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      {"domain.L", [](RunConfig& c, const std::string& v) { c.L = to_double("domain.L", v); },
       [](const RunConfig& c) { return num(c.L); }},
      {"domain.N", [](RunConfig& c, const std::string& v) { c.N = to_int32("domain.N", v); },
       [](const RunConfig& c) { return std::to_string(c.N); }},
      {"potential.kind",
       [](RunConfig& c, const std::string& v) {
         c.potential.kind = pick<PotentialKind>("potential.kind", v,
                                                {{"constant", PotentialKind::constant},
                                                 {"gaussian_well", PotentialKind::gaussian_well},
                                                 {"custom_table", PotentialKind::custom_table}});
       },
       [](const RunConfig& c) { return std::string(to_string(c.potential.kind)); }},
      {"potential.omega", [](RunConfig& c, const std::string& v) { c.potential.omega = to_double("potential.omega", v); },
       [](const RunConfig& c) { return num(c.potential.omega); }},
      {"potential.c", [](RunConfig& c, const std::string& v) { c.potential.c = to_double("potential.c", v); },
       [](const RunConfig& c) { return num(c.potential.c); }},
      {"potential.sigma", [](RunConfig& c, const std::string& v) { c.potential.sigma = to_double("potential.sigma", v); },
       [](const RunConfig& c) { return num(c.potential.sigma); }},
      {"potential.table", [](RunConfig& c, const std::string& v) { c.potential_table = v; },
       [](const RunConfig& c) { return c.potential_table; }},
      {"nonlinearity.kind",
       [](RunConfig& c, const std::string& v) {
         c.model.kind = pick<NonlinearityKind>("nonlinearity.kind", v,
                                               {{"pure_power", NonlinearityKind::pure_power},
                                                {"log_enhanced", NonlinearityKind::log_enhanced},
                                                {"weighted_power", NonlinearityKind::weighted_power}});
       },
       [](const RunConfig& c) { return std::string(to_string(c.model.kind)); }},
      {"nonlinearity.p", [](RunConfig& c, const std::string& v) { c.model.p = to_double("nonlinearity.p", v); },
       [](const RunConfig& c) { return num(c.model.p); }},
      {"nonlinearity.gamma", [](RunConfig& c, const std::string& v) { c.model.gamma = to_double("nonlinearity.gamma", v); },
       [](const RunConfig& c) { return num(c.model.gamma); }},
      {"solver.method",
       [](RunConfig& c, const std::string& v) {
         c.solver.method = pick<SolverMethod>("solver.method", v,
                                              {{"residual_min", SolverMethod::residual_min},
                                               {"mountain_pass", SolverMethod::mountain_pass}});
       },
       [](const RunConfig& c) { return std::string(to_string(c.solver.method)); }},
      {"solver.grad_tol", [](RunConfig& c, const std::string& v) { c.solver.grad_tol = to_double("solver.grad_tol", v); },
       [](const RunConfig& c) { return num(c.solver.grad_tol); }},
      {"solver.max_iters", [](RunConfig& c, const std::string& v) { c.solver.max_iters = to_int32("solver.max_iters", v); },
       [](const RunConfig& c) { return std::to_string(c.solver.max_iters); }},
      {"solver.delta0", [](RunConfig& c, const std::string& v) { c.solver.delta0 = to_double("solver.delta0", v); },
       [](const RunConfig& c) { return num(c.solver.delta0); }},
      {"solver.path_nodes", [](RunConfig& c, const std::string& v) { c.solver.path_nodes = to_int32("solver.path_nodes", v); },
       [](const RunConfig& c) { return std::to_string(c.solver.path_nodes); }},
      {"solver.seed_amplitude",
       [](RunConfig& c, const std::string& v) { c.solver.seed_amplitude = to_double("solver.seed_amplitude", v); },
       [](const RunConfig& c) { return num(c.solver.seed_amplitude); }},
      {"solver.seed_width", [](RunConfig& c, const std::string& v) { c.solver.seed_width = to_double("solver.seed_width", v); },
       [](const RunConfig& c) { return num(c.solver.seed_width); }},
      {"solver.descent_level",
       [](RunConfig& c, const std::string& v) { c.solver.descent_level = to_double("solver.descent_level", v); },
       [](const RunConfig& c) { return num(c.solver.descent_level); }},
      {"spectrum.k_max", [](RunConfig& c, const std::string& v) { c.k_max = to_int32("spectrum.k_max", v); },
       [](const RunConfig& c) { return std::to_string(c.k_max); }},
      {"landscape.s_max", [](RunConfig& c, const std::string& v) { c.landscape_s_max = to_double("landscape.s_max", v); },
       [](const RunConfig& c) { return num(c.landscape_s_max); }},
      {"landscape.samples", [](RunConfig& c, const std::string& v) { c.landscape_samples = to_int32("landscape.samples", v); },
       [](const RunConfig& c) { return std::to_string(c.landscape_samples); }},
      {"landscape.epsilon", [](RunConfig& c, const std::string& v) { c.landscape_epsilon = to_double("landscape.epsilon", v); },
       [](const RunConfig& c) { return num(c.landscape_epsilon); }},
      {"landscape.level", [](RunConfig& c, const std::string& v) { c.landscape_level = to_double("landscape.level", v); },
       [](const RunConfig& c) { return num(c.landscape_level); }},
      {"verify.fault",
       [](RunConfig& c, const std::string& v) {
         c.fault = pick<Fault>("verify.fault", v, {{"none", Fault::none}, {"kernel_sign", Fault::kernel_sign}});
       },
       [](const RunConfig& c) { return std::string(c.fault == Fault::none ? "none" : "kernel_sign"); }},
      {"output.dir", [](RunConfig& c, const std::string& v) { c.out_dir = v; },
       [](const RunConfig& c) { return c.out_dir; }},
      {"output.formats",
       [](RunConfig& c, const std::string& v) {
         c.formats.clear();
         std::stringstream ss(v);
         std::string item;
         while (std::getline(ss, item, ',')) {
           item = trim(item);
           if (item != "json" && item != "csv" && item != "raw")
             bad("output.formats", "unknown format '" + item + "' (expected json, csv, raw)");
           if (std::find(c.formats.begin(), c.formats.end(), item) == c.formats.end()) c.formats.push_back(item);
         }
       },
       [](const RunConfig& c) {
         std::string s;
         for (const auto& f : c.formats) s += (s.empty() ? "" : ",") + f;
         return s;
       }},
      {"seed",
       [](RunConfig& c, const std::string& v) {
         std::uint64_t x = 0;
         const auto* end = v.data() + v.size();
         auto [ptr, ec] = std::from_chars(v.data(), end, x);
         if (ec != std::errc() || ptr != end) bad("seed", "expected an unsigned 64-bit integer, got '" + v + "'");
         c.seed = x;
       },
       [](const RunConfig& c) { return std::to_string(c.seed); }},
  };
  return table;
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& e : entries()) keys.emplace_back(e.key);
  return keys;
}

void set_config_value(RunConfig& c, const std::string& key, const std::string& value) {
  for (const auto& e : entries()) {
    if (key == e.key) {
      e.set(c, unquote(trim(value)));
      return;
    }
  }
  fail(ErrorKind::config, "unknown key '" + key + "'");
}

void validate_config(const RunConfig& c) {
  if (!(c.L > 0.0)) bad("domain.L", "must be positive");
  if (c.N < 16 || c.N % 2 != 0) bad("domain.N", "must be even and >= 16, got " + std::to_string(c.N));
  if ((2.0 * c.L / c.N) * c.N != 2.0 * c.L) bad("domain.N", "spacing 2L/N is not exact in double precision");
  if (c.potential.kind == PotentialKind::gaussian_well && !(c.potential.sigma > 0.0))
    bad("potential.sigma", "must be positive");
  if (c.potential.kind == PotentialKind::custom_table && c.potential_table.empty())
    bad("potential.table", "custom_table needs a table path");
  if (!(c.model.gamma >= 0.0)) bad("nonlinearity.gamma", "must be >= 0");
  if (!(c.solver.grad_tol > 0.0)) bad("solver.grad_tol", "must be positive");
  if (c.solver.max_iters < 1) bad("solver.max_iters", "must be >= 1");
  if (!(c.solver.delta0 > 0.0)) bad("solver.delta0", "must be positive");
  if (c.solver.path_nodes < 5) bad("solver.path_nodes", "must be >= 5");
  if (!(c.solver.seed_amplitude > 0.0)) bad("solver.seed_amplitude", "must be positive");
  if (!(c.solver.seed_width > 0.0)) bad("solver.seed_width", "must be positive");
  if (!(c.solver.descent_level > 0.0)) bad("solver.descent_level", "must be positive");
  if (c.k_max < 1) bad("spectrum.k_max", "must be >= 1");
  if (!(c.landscape_s_max > 0.0)) bad("landscape.s_max", "must be positive");
  if (c.landscape_samples < 2) bad("landscape.samples", "must be >= 2");
  if (!(c.landscape_epsilon > 0.0)) bad("landscape.epsilon", "must be positive");
  if (!(c.landscape_level > 0.0)) bad("landscape.level", "must be positive");
  if (c.out_dir.empty()) bad("output.dir", "must not be empty");
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::config, "line " + std::to_string(lineno) + ": expected 'key = value'");
    set_config_value(c, trim(std::string_view(line).substr(0, eq)), line.substr(eq + 1));
  }
  validate_config(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::config, "cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  std::string out;
  for (const auto& e : entries()) {
    out += e.key;
    out += " = ";
    out += e.get(c);
    out += '\n';
  }
  return out;
}

}  // namespace css
