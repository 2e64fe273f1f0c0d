#ifndef CLIMACT_H
#define CLIMACT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum ClimactStatus {
  CLIMACT_STATUS_OK = 0,
  /**
   * A required pointer was null or a string was not UTF-8.
   */
  CLIMACT_STATUS_INVALID_ARGUMENT = 1,
  /**
   * Inputs failed validation (schema, dimensions, values).
   */
  CLIMACT_STATUS_VALIDATION = 2,
  /**
   * Fitting failed: every restart diverged or a gradient was non-finite.
   */
  CLIMACT_STATUS_INFERENCE = 3,
  /**
   * File system error.
   */
  CLIMACT_STATUS_IO = 4,
  /**
   * An index was out of range.
   */
  CLIMACT_STATUS_OUT_OF_RANGE = 5,
  /**
   * Internal panic; the handle involved should not be reused.
   */
  CLIMACT_STATUS_PANIC = 6,
} ClimactStatus;

/**
 * A loaded or simulated dataset.
 */
typedef struct ClimactDataset ClimactDataset;

/**
 * The outcome of a fit.
 */
typedef struct ClimactFit ClimactFit;

/**
 * Plain-value fit settings. Obtain defaults from [`climact_fit_config_default`].
 */
typedef struct ClimactFitConfig {
  double learning_rate;
  uint32_t n_restarts;
  uint32_t n_steps;
  uint32_t n_predictive_samples;
  uint64_t seed;
  double var_s;
  /**
   * Relative early-stopping tolerance; 0 disables early stopping.
   */
  double early_stop_tol;
} ClimactFitConfig;

/**
 * Posterior summary of one parameter.
 */
typedef struct ClimactParameter {
  double mean;
  double sd;
  double ci_low;
  double ci_high;
} ClimactParameter;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *climact_version(void);

/**
 * Copies the last error message of this thread into `buf` and returns its
 * length. Pass a null buffer to query the length.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t climact_last_error(char *buf, size_t len);

/**
 * Loads `catalog.csv`, `users.csv` and the optional media files from `dir`.
 *
 * # Safety
 * `dir` must be a NUL-terminated string; `out` must be writable.
 */
enum ClimactStatus climact_dataset_load(const char *dir,
                                        bool standardize,
                                        bool gap_enabled,
                                        struct ClimactDataset **out);

/**
 * Simulates `n_users` users over a random catalog of `k` subreddits with the
 * built-in example parameters.
 *
 * # Safety
 * `out` must be writable.
 */
enum ClimactStatus climact_dataset_simulate(size_t k,
                                            size_t n_users,
                                            double var_s,
                                            uint64_t seed,
                                            struct ClimactDataset **out);

/**
 * # Safety
 * `ds` must be a live dataset handle or null.
 */
size_t climact_dataset_n_users(const struct ClimactDataset *ds);

/**
 * # Safety
 * `ds` must be a live dataset handle or null.
 */
size_t climact_dataset_n_subreddits(const struct ClimactDataset *ds);

/**
 * Fraction of activated users, or NaN for a null handle.
 *
 * # Safety
 * `ds` must be a live dataset handle or null.
 */
double climact_dataset_activation_rate(const struct ClimactDataset *ds);

/**
 * # Safety
 * `ds` must be a handle from this library, not yet freed, or null.
 */
void climact_dataset_free(struct ClimactDataset *ds);

/**
 * Fills `cfg` with the library defaults.
 *
 * # Safety
 * `cfg` must be writable.
 */
enum ClimactStatus climact_fit_config_default(struct ClimactFitConfig *cfg);

/**
 * Fits the network to `ds`. `removed_groups` is null for the full network
 * or a comma-separated subset of `E,I,M,D`.
 *
 * # Safety
 * `ds` must be a live dataset handle, `cfg` readable, `removed_groups` null
 * or NUL-terminated, and `out` writable.
 */
enum ClimactStatus climact_fit(const struct ClimactDataset *ds,
                               const struct ClimactFitConfig *cfg,
                               const char *removed_groups,
                               struct ClimactFit **out);

/**
 * Posterior predictive accuracy of the selected restart, or NaN for a null
 * handle.
 *
 * # Safety
 * `f` must be a live fit handle or null.
 */
double climact_fit_accuracy(const struct ClimactFit *f);

/**
 * # Safety
 * `f` must be a live fit handle or null.
 */
size_t climact_fit_n_parameters(const struct ClimactFit *f);

/**
 * # Safety
 * `f` must be a live fit handle; `out` writable.
 */
enum ClimactStatus climact_fit_parameter(const struct ClimactFit *f,
                                         size_t index,
                                         struct ClimactParameter *out);

/**
 * Index of the parameter called `name`, or -1 when absent.
 *
 * # Safety
 * `f` must be a live fit handle or null; `name` NUL-terminated or null.
 */
int64_t climact_fit_parameter_index(const struct ClimactFit *f, const char *name);

/**
 * Copies the name of parameter `index` into `buf`; returns its length, or 0
 * when the index is out of range.
 *
 * # Safety
 * `f` must be a live fit handle or null; `buf` null or `len` writable bytes.
 */
size_t climact_fit_parameter_name(const struct ClimactFit *f, size_t index, char *buf, size_t len);

/**
 * Copies the fit result as JSON into `buf`; returns the full length. Pass a
 * null buffer to query the size.
 *
 * # Safety
 * `f` must be a live fit handle or null; `buf` null or `len` writable bytes.
 */
size_t climact_fit_to_json(const struct ClimactFit *f, char *buf, size_t len);

/**
 * # Safety
 * `f` must be a handle from this library, not yet freed, or null.
 */
void climact_fit_free(struct ClimactFit *f);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CLIMACT_H */
