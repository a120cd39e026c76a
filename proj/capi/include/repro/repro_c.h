/*
 * C interface to the repro-samples inference library.
 *
 * All functions return a repro_status; non-zero means failure and
 * repro_last_error() describes it (thread local). Results are returned as
 * JSON strings allocated by the library; release them with
 * repro_string_free(). Handles are opaque and freed with their matching
 * *_free function.
 *
 * Configuration goes in as JSON too. Unknown keys are ignored; omitted
 * keys take the documented defaults.
 */
#ifndef REPRO_C_H
#define REPRO_C_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum repro_status {
  REPRO_OK = 0,
  REPRO_ERR_ARG = 1,     /* invalid argument or configuration */
  REPRO_ERR_PARSE = 2,   /* malformed CSV or JSON input */
  REPRO_ERR_NUMERIC = 3, /* numerical failure (non-convergence, degeneracy) */
  REPRO_ERR_INTERNAL = 4
} repro_status;

typedef struct repro_dataset repro_dataset;
typedef struct repro_candidates repro_candidates;

/* h(beta) for functional confidence sets; beta has length p. */
typedef double (*repro_functional_fn)(const double* beta, int p, void* user);

const char* repro_version(void);

/* Message for the most recent failure on this thread. */
const char* repro_last_error(void);

void repro_string_free(char* str);

/* Dataset: y of length n, x row-major n x p. */
repro_status repro_dataset_create(const double* y, const double* x_rowmajor,
                                  int n, int p, repro_dataset** out);
repro_status repro_dataset_from_csv(const char* x_path, const char* y_path,
                                    repro_dataset** out);
void repro_dataset_free(repro_dataset* dataset);
int repro_dataset_n(const repro_dataset* dataset);
int repro_dataset_p(const repro_dataset* dataset);

/*
 * Candidate-model search. Config keys:
 *   d (int, default 1000), seed (uint), threads (int, default 1),
 *   mode ("penalized" | "constrained"), k_max (int, constrained mode),
 *   max_support (int, 0 = automatic), lambda_grid (descending array),
 *   grid_size (int, default 100), lambda_min_ratio (default 1e-3).
 */
repro_status repro_search(const repro_dataset* dataset, const char* config_json,
                          repro_candidates** out);

repro_status repro_candidates_from_json(const char* json,
                                        repro_candidates** out);
repro_status repro_candidates_to_json(const repro_candidates* candidates,
                                      char** out_json);
void repro_candidates_free(repro_candidates* candidates);

/*
 * Model confidence set. Options: alpha (default 0.95), J (default 200),
 * seed, threads.
 */
repro_status repro_model_cs(const repro_dataset* dataset,
                            const repro_candidates* candidates,
                            const char* options_json, char** out_json);

/* Options: alpha (default 0.95). */
repro_status repro_coef_single(const repro_dataset* dataset,
                               const repro_candidates* candidates, int index,
                               const char* options_json, char** out_json);

/* lambda_set: strictly increasing 1-based indices, length l >= 1. */
repro_status repro_coef_subset(const repro_dataset* dataset,
                               const repro_candidates* candidates,
                               const int* lambda_set, int l,
                               const char* options_json, char** out_json);

repro_status repro_coef_joint(const repro_dataset* dataset,
                              const repro_candidates* candidates,
                              const char* options_json, char** out_json);

/*
 * Functional of the full coefficient vector over the joint set. Either
 * pass h (sampled, options key samples_per_region, default 10000, plus
 * seed) or set options key "linear": {"coeffs": [...p...], "intercept": c}
 * for the exact route and pass h = NULL.
 */
repro_status repro_coef_functional(const repro_dataset* dataset,
                                   const repro_candidates* candidates,
                                   repro_functional_fn h, void* user,
                                   const char* options_json, char** out_json);

/*
 * Two-stage set restricted to a level-alpha1 model confidence set with
 * per-model regions at alpha2; reported level alpha1 + alpha2 - 1.
 * Options: alpha1, alpha2 (both in (1/2, 1)), J, seed, threads.
 */
repro_status repro_coef_modified(const repro_dataset* dataset,
                                 const repro_candidates* candidates,
                                 const int* lambda_set, int l,
                                 const char* options_json, char** out_json);

/*
 * Inference for L beta: L row-major l x p. The candidate search reruns on
 * the transformed design; search config keys as in repro_search plus
 * alpha.
 */
repro_status repro_linear_transform(const repro_dataset* dataset,
                                    const double* L_rowmajor, int l,
                                    const char* config_json, char** out_json);

/*
 * Residual bootstrap baseline. Options: B (default 1000), criterion
 * ("aic" | "bic" | "cv"), seed, threads.
 */
repro_status repro_bootstrap_models(const repro_dataset* dataset,
                                    const char* options_json, char** out_json);

/* Identifiability diagnostic; brute force, guarded for small p. */
repro_status repro_c_min(const repro_dataset* dataset, const int* tau0,
                         int tau0_len, const double* beta0, double* out);

/*
 * Simulation harness. scenario_json: either {"name": "M1"|"M2"|"M3",
 * "scale": "desk"|"full", overrides...} or a full custom config. Emits the
 * metric report as JSON and CSV.
 */
repro_status repro_simulate(const char* scenario_json, char** out_report_json,
                            char** out_report_csv);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* REPRO_C_H */
