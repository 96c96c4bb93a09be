/* C API for the digmm anomaly-detection library.
 *
 * Conventions:
 *   - Every fallible call returns a digmm_status; DIGMM_OK means success.
 *   - On failure, digmm_last_error_message() returns a thread-local,
 *     human-readable description of the most recent error on this thread.
 *   - Objects are opaque handles created by the library and released with
 *     the matching *_free function (safe on NULL).
 *   - Strings returned through char** are heap-allocated; release them with
 *     digmm_string_free.
 *   - Datasets are row-major n x d matrices with optional {0,1} labels
 *     (1 = normal, 0 = anomalous).
 *   - Model scores share one convention: score > 0 means normal, <= 0
 *     anomalous.
 */
#ifndef DIGMM_H
#define DIGMM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(DIGMM_BUILD_SHARED)
#    define DIGMM_API __declspec(dllexport)
#  else
#    define DIGMM_API __declspec(dllimport)
#  endif
#else
#  if defined(DIGMM_BUILD_SHARED)
#    define DIGMM_API __attribute__((visibility("default")))
#  else
#    define DIGMM_API
#  endif
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum digmm_status {
  DIGMM_OK = 0,
  DIGMM_ERR_INVALID_ARGUMENT = 1,
  DIGMM_ERR_DIMENSION_MISMATCH = 2,
  DIGMM_ERR_LENGTH_MISMATCH = 3,
  DIGMM_ERR_NON_SYMMETRIC = 4,
  DIGMM_ERR_NOT_POSITIVE_DEFINITE = 5,
  DIGMM_ERR_TOO_FEW_SAMPLES = 6,
  DIGMM_ERR_DEGENERATE_DATA = 7,
  DIGMM_ERR_INFEASIBLE = 8,
  DIGMM_ERR_INFEASIBLE_POINT = 9,
  DIGMM_ERR_NO_CONVERGENCE = 10,
  DIGMM_ERR_MISSING_LABELS = 11,
  DIGMM_ERR_SINGLE_CLASS = 12,
  DIGMM_ERR_DIMENSION_NOT_TWO = 13,
  DIGMM_ERR_PARSE = 14,
  DIGMM_ERR_NON_FINITE_VALUE = 15,
  DIGMM_ERR_RAGGED_ROWS = 16,
  DIGMM_ERR_SCHEMA = 17,
  DIGMM_ERR_VERSION = 18,
  DIGMM_ERR_INVARIANT_VIOLATION = 19,
  DIGMM_ERR_REJECTION_STALL = 20,
  DIGMM_ERR_IO = 21,
  DIGMM_ERR_UNKNOWN = 100
} digmm_status;

/* Stable lowercase name for a status code (e.g. "not_positive_definite"). */
DIGMM_API const char* digmm_status_name(digmm_status status);

/* Message for the most recent failure on the calling thread; never NULL. */
DIGMM_API const char* digmm_last_error_message(void);

typedef struct digmm_dataset digmm_dataset;
typedef struct digmm_model digmm_model;

/* ---- datasets ---------------------------------------------------------- */

DIGMM_API digmm_status digmm_dataset_from_arrays(const double* points,
                                                 int64_t rows, int64_t cols,
                                                 const int32_t* labels_or_null,
                                                 digmm_dataset** out);
DIGMM_API digmm_status digmm_dataset_read_csv(const char* path,
                                              digmm_dataset** out);
DIGMM_API digmm_status digmm_dataset_write_csv(const digmm_dataset* data,
                                               const char* path);
/* Same CSV text as digmm_dataset_write_csv, returned as a string. */
DIGMM_API digmm_status digmm_dataset_csv_string(const digmm_dataset* data,
                                                char** out_csv);
/* Keeps only label-1 rows (training is all-normal). */
DIGMM_API digmm_status digmm_dataset_filter_normal(const digmm_dataset* data,
                                                   digmm_dataset** out);
DIGMM_API int64_t digmm_dataset_rows(const digmm_dataset* data);
DIGMM_API int64_t digmm_dataset_cols(const digmm_dataset* data);
DIGMM_API int digmm_dataset_has_labels(const digmm_dataset* data);
/* Buffers must hold rows*cols (points) or rows (labels) entries. */
DIGMM_API digmm_status digmm_dataset_copy_points(const digmm_dataset* data,
                                                 double* out_row_major);
DIGMM_API digmm_status digmm_dataset_copy_labels(const digmm_dataset* data,
                                                 int32_t* out);
DIGMM_API void digmm_dataset_free(digmm_dataset* data);

/* ---- synthetic scenarios ----------------------------------------------- */

/* JSON text of a built-in scenario; the only preset name is "paper-like". */
DIGMM_API digmm_status digmm_preset_scenario_json(const char* name,
                                                  char** out_json);
/* Samples the scenario described by the JSON document.  When
 * override_seed is nonzero the scenario's own seed is replaced by *seed. */
DIGMM_API digmm_status digmm_dataset_generate(const char* scenario_json,
                                              int override_seed,
                                              uint64_t seed,
                                              digmm_dataset** out);

/* ---- fitting ------------------------------------------------------------ */

typedef struct digmm_em_options {
  int32_t max_iters;   /* default 500 */
  double rel_tol;      /* default 1e-8 */
  int32_t n_init;      /* default 5 */
  double reg_covar;    /* default 1e-6 */
  uint64_t seed;       /* default 0 */
} digmm_em_options;

DIGMM_API void digmm_em_options_init(digmm_em_options* options);

/* Mixture + one-class boundary.  Labels in the dataset are ignored here;
 * filter first if training must be all-normal. */
DIGMM_API digmm_status digmm_fit_boundary(const digmm_dataset* data,
                                          int32_t components, double nu,
                                          const digmm_em_options* em_or_null,
                                          double solver_tol,
                                          digmm_model** out);
/* Mixture + log-density threshold at the target_fpr training quantile. */
DIGMM_API digmm_status digmm_fit_threshold_by_fpr(
    const digmm_dataset* data, int32_t components, double target_fpr,
    const digmm_em_options* em_or_null, digmm_model** out);
/* Mixture + explicitly chosen log-density threshold. */
DIGMM_API digmm_status digmm_fit_threshold_at(
    const digmm_dataset* data, int32_t components, double log_threshold,
    const digmm_em_options* em_or_null, digmm_model** out);

/* ---- models ------------------------------------------------------------- */

DIGMM_API digmm_status digmm_model_save(const digmm_model* model,
                                        const char* path);
DIGMM_API digmm_status digmm_model_load(const char* path, digmm_model** out);
/* "digmm" or "threshold_gmm". */
DIGMM_API const char* digmm_model_kind(const digmm_model* model);
DIGMM_API int32_t digmm_model_dim(const digmm_model* model);
DIGMM_API digmm_status digmm_model_score(const digmm_model* model,
                                         const double* x, int64_t dim,
                                         double* out_score);
/* out_scores must hold one entry per dataset row; row order preserved. */
DIGMM_API digmm_status digmm_model_score_dataset(const digmm_model* model,
                                                 const digmm_dataset* data,
                                                 double* out_scores);
/* Fit provenance as a JSON object (seed, likelihood, solver status, ...). */
DIGMM_API digmm_status digmm_model_metadata_json(const digmm_model* model,
                                                 char** out_json);
DIGMM_API void digmm_model_free(digmm_model* model);

/* ---- evaluation ---------------------------------------------------------- */

/* JSON object with keys auc, tpr_at_zero, fpr_at_zero, n_eval and, for
 * threshold models, best_threshold_accuracy.  Requires labels. */
DIGMM_API digmm_status digmm_evaluate_json(const digmm_model* model,
                                           const digmm_dataset* data,
                                           char** out_json);
/* CSV text (header x,y,value) of the model's decision surface on a regular
 * resolution x resolution grid.  Model must be two-dimensional. */
DIGMM_API digmm_status digmm_grid_csv(const digmm_model* model, double x_min,
                                      double x_max, double y_min, double y_max,
                                      int32_t resolution, char** out_csv);

DIGMM_API void digmm_string_free(char* text);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* DIGMM_H */
