#include "css/css.h"

#include <cstring>
#include <new>
#include <string>

#include "css/commands.hpp"
#include "css/config.hpp"

struct css_config {
  css::RunConfig value;
};

struct css_problem {
  css::Problem value;
};

namespace {

thread_local std::string last_error;

css_status status_for(css::ErrorKind kind) {
  using css::ErrorKind;
  switch (kind) {
    case ErrorKind::usage: return CSS_ERR_USAGE;
    case ErrorKind::numeric: return CSS_ERR_NUMERIC;
    case ErrorKind::capacity: return CSS_ERR_CAPACITY;
    case ErrorKind::degeneracy: return CSS_ERR_DEGENERACY;
    case ErrorKind::hypothesis: return CSS_ERR_HYPOTHESIS;
    case ErrorKind::growth: return CSS_ERR_GROWTH;
    case ErrorKind::convergence: return CSS_ERR_CONVERGENCE;
    case ErrorKind::config: return CSS_ERR_CONFIG;
    case ErrorKind::io: return CSS_ERR_IO;
  }
  return CSS_ERR_INTERNAL;
}

template <class Fn>
css_status guard(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return CSS_OK;
  } catch (const css::Error& e) {
    last_error = e.what();
    return status_for(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return CSS_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return CSS_ERR_INTERNAL;
  }
}

char* dup(const std::string& s) {
  char* p = new char[s.size() + 1];
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void require(bool ok, const char* what) {
  if (!ok) css::fail(css::ErrorKind::usage, what);
}

css::Field field_from(const css_problem* p, const double* u, size_t n) {
  require(u != nullptr, "null field pointer");
  require(n == p->value.grid.node_count(), "field length does not match N*N");
  return css::Field(p->value.grid, std::vector<double>(u, u + n));
}

using Runner = css::CommandResult (*)(const css::RunConfig&);

css_status run(Runner fn, const css_config* c, int* exit_code, char** report) {
  return guard([&] {
    require(c != nullptr && exit_code != nullptr && report != nullptr, "null argument");
    const css::CommandResult r = fn(c->value);
    *exit_code = r.exit_code;
    *report = dup(r.report);
  });
}

}  // namespace

extern "C" {

const char* css_version(void) { return CSS_VERSION; }

const char* css_last_error(void) { return last_error.c_str(); }

const char* css_status_name(css_status status) {
  switch (status) {
    case CSS_OK: return "ok";
    case CSS_ERR_USAGE: return "usage-error";
    case CSS_ERR_NUMERIC: return "numeric-error";
    case CSS_ERR_CAPACITY: return "capacity-error";
    case CSS_ERR_DEGENERACY: return "degeneracy-error";
    case CSS_ERR_HYPOTHESIS: return "hypothesis-error";
    case CSS_ERR_GROWTH: return "growth-error";
    case CSS_ERR_CONVERGENCE: return "convergence-error";
    case CSS_ERR_CONFIG: return "config-error";
    case CSS_ERR_IO: return "io-error";
    case CSS_ERR_INTERNAL: return "internal-error";
  }
  return "unknown";
}

css_status css_config_load(const char* path, css_config** out) {
  return guard([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new css_config{css::load_config(path)};
  });
}

css_status css_config_parse(const char* text, css_config** out) {
  return guard([&] {
    require(text != nullptr && out != nullptr, "null argument");
    *out = new css_config{css::parse_config(text)};
  });
}

css_status css_config_set(css_config* config, const char* key, const char* value) {
  return guard([&] {
    require(config != nullptr && key != nullptr && value != nullptr, "null argument");
    css::RunConfig next = config->value;
    css::set_config_value(next, key, value);
    css::validate_config(next);
    config->value = std::move(next);
  });
}

css_status css_config_serialize(const css_config* config, char** out) {
  return guard([&] {
    require(config != nullptr && out != nullptr, "null argument");
    *out = dup(css::serialize_config(config->value));
  });
}

void css_config_free(css_config* config) { delete config; }

void css_string_free(char* s) { delete[] s; }

css_status css_run_verify(const css_config* c, int* exit_code, char** report) {
  return run(css::run_verify, c, exit_code, report);
}
css_status css_run_spectrum(const css_config* c, int* exit_code, char** report) {
  return run(css::run_spectrum, c, exit_code, report);
}
css_status css_run_solve(const css_config* c, int* exit_code, char** report) {
  return run(css::run_solve, c, exit_code, report);
}
css_status css_run_landscape(const css_config* c, int* exit_code, char** report) {
  return run(css::run_landscape, c, exit_code, report);
}

css_status css_problem_create(const css_config* config, css_problem** out) {
  return guard([&] {
    require(config != nullptr && out != nullptr, "null argument");
    *out = new css_problem{css::build_problem(config->value)};
  });
}

void css_problem_free(css_problem* problem) { delete problem; }

css_status css_problem_grid(const css_problem* p, double* half_width, int* points_per_side) {
  return guard([&] {
    require(p != nullptr && half_width != nullptr && points_per_side != nullptr, "null argument");
    *half_width = p->value.grid.half_width();
    *points_per_side = p->value.grid.points_per_side();
  });
}

css_status css_problem_energy(const css_problem* p, const double* u, size_t n, double* phi) {
  return guard([&] {
    require(p != nullptr && phi != nullptr, "null argument");
    *phi = p->value.functional->value(field_from(p, u, n));
  });
}

css_status css_problem_gradient(const css_problem* p, const double* u, size_t n, double* g, double* residual) {
  return guard([&] {
    require(p != nullptr && g != nullptr, "null argument");
    const css::GradientReport r = p->value.functional->gradient(field_from(p, u, n));
    std::memcpy(g, r.g.values().data(), n * sizeof(double));
    if (residual != nullptr) *residual = r.residual;
  });
}

css_status css_problem_gauge(const css_problem* p, const double* u, size_t n, double* a0, double* a1,
                             double* a2) {
  return guard([&] {
    require(p != nullptr && a0 != nullptr && a1 != nullptr && a2 != nullptr, "null argument");
    const css::GaugeSet g = p->value.functional->gauge_solver().compute(field_from(p, u, n));
    std::memcpy(a0, g.A0.values().data(), n * sizeof(double));
    std::memcpy(a1, g.A1.values().data(), n * sizeof(double));
    std::memcpy(a2, g.A2.values().data(), n * sizeof(double));
  });
}

css_status css_problem_spectrum(const css_problem* p, int* ell, double* lambdas, size_t capacity, double* gap) {
  return guard([&] {
    require(p != nullptr && ell != nullptr, "null argument");
    const css::SpectralSplit& s = *p->value.split;
    *ell = s.ell();
    const auto neg = s.negative_eigenvalues();
    require(lambdas != nullptr || capacity == 0, "null eigenvalue buffer");
    for (size_t k = 0; k < neg.size() && k < capacity; ++k) lambdas[k] = neg[k];
    if (gap != nullptr) *gap = s.gap();
  });
}

}  // extern "C"
