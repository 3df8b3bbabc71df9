/* C interface to the Chern-Simons-Schrodinger solver library. */
#ifndef CSS_CSS_H
#define CSS_CSS_H

#include <stddef.h>

#if defined(CSS_BUILDING_LIBRARY)
#define CSS_API __attribute__((visibility("default")))
#else
#define CSS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum css_status {
  CSS_OK = 0,
  CSS_ERR_USAGE = 1,
  CSS_ERR_NUMERIC = 2,
  CSS_ERR_CAPACITY = 3,
  CSS_ERR_DEGENERACY = 4,
  CSS_ERR_HYPOTHESIS = 5,
  CSS_ERR_GROWTH = 6,
  CSS_ERR_CONVERGENCE = 7,
  CSS_ERR_CONFIG = 8,
  CSS_ERR_IO = 9,
  CSS_ERR_INTERNAL = 10
} css_status;

typedef struct css_config css_config;
typedef struct css_problem css_problem;

CSS_API const char* css_version(void);
/* Message of the last failing call on this thread; never NULL. */
CSS_API const char* css_last_error(void);
CSS_API const char* css_status_name(css_status status);

CSS_API css_status css_config_load(const char* path, css_config** out);
CSS_API css_status css_config_parse(const char* text, css_config** out);
CSS_API css_status css_config_set(css_config* config, const char* key, const char* value);
/* *out is owned by the caller; release with css_string_free. */
CSS_API css_status css_config_serialize(const css_config* config, char** out);
CSS_API void css_config_free(css_config* config);
CSS_API void css_string_free(char* s);

/* Commands. *exit_code follows the CLI contract (0 ok, 1 verification
 * failure, 2 config error, 3 degeneracy, 4 non-convergence) and *report
 * receives a JSON document to release with css_string_free. The status is
 * CSS_OK whenever a report was produced. */
CSS_API css_status css_run_verify(const css_config* config, int* exit_code, char** report);
CSS_API css_status css_run_spectrum(const css_config* config, int* exit_code, char** report);
CSS_API css_status css_run_solve(const css_config* config, int* exit_code, char** report);
CSS_API css_status css_run_landscape(const css_config* config, int* exit_code, char** report);

/* Problem handle: grid, operator, spectral split and energy functional.
 * Field arguments are row-major arrays of N*N doubles. */
CSS_API css_status css_problem_create(const css_config* config, css_problem** out);
CSS_API void css_problem_free(css_problem* problem);
CSS_API css_status css_problem_grid(const css_problem* problem, double* half_width, int* points_per_side);
CSS_API css_status css_problem_energy(const css_problem* problem, const double* u, size_t n, double* phi);
CSS_API css_status css_problem_gradient(const css_problem* problem, const double* u, size_t n, double* g,
                                        double* residual);
CSS_API css_status css_problem_gauge(const css_problem* problem, const double* u, size_t n, double* a0,
                                     double* a1, double* a2);
/* Writes up to capacity negative eigenvalues. */
CSS_API css_status css_problem_spectrum(const css_problem* problem, int* ell, double* lambdas, size_t capacity,
                                        double* gap);

#ifdef __cplusplus
}
#endif

#endif /* CSS_CSS_H */
