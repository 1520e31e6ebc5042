#ifndef EDFD_H
#define EDFD_H

/* C interface to the entropy-dissipating finite-difference solver.
 *
 * Every function returning edfd_status reports failures through the status
 * code; edfd_last_error() then holds a message for the calling thread.
 * Handles are opaque and must be released with the matching *_free call.
 * Buffers passed to *_render / *_table functions follow the snprintf
 * convention: `needed` receives the full length (without the terminator),
 * and the text is truncated to fit `capacity`.
 */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define EDFD_API __declspec(dllexport)
#else
#define EDFD_API __attribute__((visibility("default")))
#endif

typedef enum edfd_status {
  EDFD_OK = 0,
  EDFD_INVALID_ARGUMENT = 1,
  EDFD_SINGULAR_DENOMINATOR = 2,
  EDFD_INVALID_ALPHA = 3,
  EDFD_NOT_NONNEGATIVE = 4,
  EDFD_NONPOSITIVE_STATE = 5,
  EDFD_ZERO_ENTROPY_VARIABLE = 6,
  EDFD_STEP_SIZE_UNDERFLOW = 7,
  EDFD_POSITIVITY_LOSS = 8,
  EDFD_DEGENERATE_WINDOW = 9,
  EDFD_INCOMPATIBLE_GRIDS = 10,
  EDFD_UNKNOWN_PRESET = 11,
  EDFD_MALFORMED_HEADER = 12,
  EDFD_TRUNCATED_DATA = 13,
  EDFD_CONFIG_ERROR = 14,
  EDFD_IO_ERROR = 15,
  EDFD_CHECK_FAILED = 16,
  EDFD_INTERNAL_ERROR = 99
} edfd_status;

typedef struct edfd_config edfd_config;
typedef struct edfd_scheme edfd_scheme;

typedef struct edfd_run_summary {
  size_t accepted_steps;
  size_t rejected_steps;
  size_t records;
  double t_final;
  double entropy_initial;
  double entropy_final;
  /* Largest increase of the entropy between consecutive accepted steps. */
  double max_entropy_increase;
  double mass_relative_drift;
  double min_u;
  /* K(alpha, beta) in 1D, the polynomial margin in 2D; negative means no
   * entropy-dissipation guarantee. */
  double admissibility;
} edfd_run_summary;

EDFD_API const char* edfd_last_error(void);
EDFD_API const char* edfd_status_name(edfd_status status);

/* Configuration (see the README for keys). */
EDFD_API edfd_status edfd_config_new(edfd_config** out);
EDFD_API edfd_status edfd_config_parse(const char* text, edfd_config** out);
EDFD_API edfd_status edfd_config_load(const char* path, edfd_config** out);
EDFD_API edfd_status edfd_config_set(edfd_config* config, const char* key, const char* value);
EDFD_API edfd_status edfd_config_render(const edfd_config* config, char* buffer, size_t capacity,
                                        size_t* needed);
EDFD_API void edfd_config_free(edfd_config* config);

/* Experiments; output files go to run.out_dir. */
EDFD_API edfd_status edfd_run_evolve(const edfd_config* config, edfd_run_summary* summary);
EDFD_API edfd_status edfd_run_denoise(const edfd_config* config, edfd_run_summary* summary);
EDFD_API edfd_status edfd_run_convergence(const edfd_config* config, double* order);
/* Returns EDFD_CHECK_FAILED when a check fails; the table is filled either way. */
EDFD_API edfd_status edfd_run_check(const edfd_config* config, char* table, size_t capacity,
                                    size_t* needed);

/* Spatial scheme built from a configuration. */
EDFD_API edfd_status edfd_scheme_new(const edfd_config* config, edfd_scheme** out);
EDFD_API size_t edfd_scheme_size(const edfd_scheme* scheme);
EDFD_API edfd_status edfd_scheme_initial_state(const edfd_scheme* scheme, double* u, size_t n);
EDFD_API edfd_status edfd_scheme_rhs(const edfd_scheme* scheme, const double* u, double* du,
                                     size_t n);
EDFD_API edfd_status edfd_scheme_entropy(const edfd_scheme* scheme, const double* u, size_t n,
                                         double* entropy);
EDFD_API edfd_status edfd_scheme_entropy_production(const edfd_scheme* scheme, const double* u,
                                                    size_t n, double* production);
EDFD_API void edfd_scheme_free(edfd_scheme* scheme);

/* Coefficients: lambda[4] receives (lambda1..lambda4) at the optimal lambda4. */
EDFD_API edfd_status edfd_lambda_optimal(double alpha, double a, double b, double beta,
                                         double lambda[4]);
EDFD_API edfd_status edfd_admissibility(double alpha, double a, double b, double beta,
                                        double* K);

#ifdef __cplusplus
}
#endif

#endif
