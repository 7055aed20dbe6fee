/* C interface for the tailfit heavy-tail distribution fitting library. */

#pragma once

/* Generated with cbindgen:0.29.4 */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible entry point.
 */
typedef enum TfStatus {
  TF_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  TF_STATUS_NULL_POINTER = 1,
  /**
   * An argument violated a precondition (bad range, wrong family).
   */
  TF_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The data cannot support the computation.
   */
  TF_STATUS_DATA_ERROR = 3,
} TfStatus;

/**
 * Parameter selector for [`tf_fit_param`].
 */
typedef enum TfParam {
  /**
   * GEV or GPD shape.
   */
  TF_PARAM_SHAPE = 0,
  /**
   * GEV location.
   */
  TF_PARAM_LOCATION = 1,
  /**
   * GEV or GPD scale.
   */
  TF_PARAM_SCALE = 2,
  /**
   * Lognormal log-scale location.
   */
  TF_PARAM_MU = 3,
  /**
   * Lognormal log-scale dispersion.
   */
  TF_PARAM_SIGMA = 4,
} TfParam;

/**
 * Distribution family of a fit.
 */
typedef enum TfFamily {
  TF_FAMILY_LOGNORMAL = 0,
  TF_FAMILY_GEV = 1,
  TF_FAMILY_GPD = 2,
} TfFamily;

/**
 * Opaque fit: the model, its bookkeeping, and the data it was fitted on.
 */
typedef struct TfFit TfFit;

/**
 * Opaque validated positive series.
 */
typedef struct TfSample TfSample;

/**
 * Flat result of one goodness-of-fit test.
 */
typedef struct TfGofResult {
  double statistic;
  double p_value;
  /**
   * 1 iff p_value < alpha.
   */
  int reject;
  double alpha;
  /**
   * 0 when the p-value is asymptotic.
   */
  size_t bootstrap_reps;
  /**
   * Bootstrap replicates that had to be redrawn.
   */
  uint32_t refit_retries;
} TfGofResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread. Never NULL;
 * valid until the next failing call on the same thread.
 */
const char *tf_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *tf_version(void);

/**
 * Build a sample from `len` values at `values`. All values must be finite
 * and strictly positive.
 *
 * # Safety
 * `values` must point to `len` readable doubles; `out` must be a valid
 * pointer to a `TfSample*`.
 */
enum TfStatus tf_sample_new(const double *values, size_t len, struct TfSample **out);

/**
 * Number of observations in a sample; 0 for NULL.
 *
 * # Safety
 * `sample` must be NULL or a live pointer from [`tf_sample_new`].
 */
size_t tf_sample_len(const struct TfSample *sample);

/**
 * # Safety
 * `sample` must be NULL or an owned pointer from [`tf_sample_new`], not
 * freed before.
 */
void tf_sample_free(struct TfSample *sample);

/**
 * Closed-form Lognormal MLE on the full sample.
 *
 * # Safety
 * `sample` must be a live pointer from [`tf_sample_new`]; `out` must be a
 * valid pointer to a `TfFit*`.
 */
enum TfStatus tf_fit_lognormal(const struct TfSample *sample, struct TfFit **out);

/**
 * Three-parameter GEV MLE on the full sample.
 *
 * # Safety
 * Same contract as [`tf_fit_lognormal`].
 */
enum TfStatus tf_fit_gev(const struct TfSample *sample, struct TfFit **out);

/**
 * Block-maxima GEV pipeline with contiguous blocks.
 *
 * # Safety
 * Same contract as [`tf_fit_lognormal`].
 */
enum TfStatus tf_fit_block_maxima(const struct TfSample *sample,
                                  size_t block_count,
                                  struct TfFit **out);

/**
 * Peak-over-threshold GPD fit. `auto_threshold != 0` selects the
 * threshold from the Hill plot; otherwise `threshold` is used as given.
 * The fit retains the exceedances, so tests run against the right data.
 *
 * # Safety
 * Same contract as [`tf_fit_lognormal`].
 */
enum TfStatus tf_fit_pot(const struct TfSample *sample,
                         double threshold,
                         int auto_threshold,
                         struct TfFit **out);

/**
 * # Safety
 * `fit` must be NULL or an owned pointer from a fit constructor, not
 * freed before.
 */
void tf_fit_free(struct TfFit *fit);

/**
 * Family of a fitted model; -1 for NULL.
 *
 * # Safety
 * `fit` must be NULL or a live fit pointer.
 */
int tf_fit_family(const struct TfFit *fit);

/**
 * Fetch one fitted parameter. Requesting a parameter the family does not
 * have is an invalid-argument error.
 *
 * # Safety
 * `fit` must be a live fit pointer; `out` must point to a writable double.
 */
enum TfStatus tf_fit_param(const struct TfFit *fit, enum TfParam which, double *out);

/**
 * Log-likelihood of the fit on the data it used.
 *
 * # Safety
 * `fit` must be a live fit pointer; `out` must point to a writable double.
 */
enum TfStatus tf_fit_log_likelihood(const struct TfFit *fit, double *out);

/**
 * Number of observations the fit used (blocks, exceedances or full n);
 * 0 for NULL.
 *
 * # Safety
 * `fit` must be NULL or a live fit pointer.
 */
size_t tf_fit_n_used(const struct TfFit *fit);

/**
 * 1 when the optimizer converged, 0 otherwise; -1 for NULL.
 *
 * # Safety
 * `fit` must be NULL or a live fit pointer.
 */
int tf_fit_converged(const struct TfFit *fit);

/**
 * Resolved POT threshold. Fails with a data error for non-POT fits.
 *
 * # Safety
 * `fit` must be a live fit pointer; `out` must point to a writable double.
 */
enum TfStatus tf_fit_threshold(const struct TfFit *fit, double *out);

/**
 * CDF of the fitted model at x.
 *
 * # Safety
 * `fit` must be a live fit pointer; `out` must point to a writable double.
 */
enum TfStatus tf_fit_cdf(const struct TfFit *fit, double x, double *out);

/**
 * Quantile of the fitted model at p in (0, 1).
 *
 * # Safety
 * `fit` must be a live fit pointer; `out` must point to a writable double.
 */
enum TfStatus tf_fit_quantile(const struct TfFit *fit, double p, double *out);

/**
 * Kolmogorov-Smirnov test of the fit against the data it used.
 * `bootstrap != 0` uses the parametric bootstrap with `reps` replicates
 * seeded by `seed`; otherwise the asymptotic p-value.
 *
 * # Safety
 * `fit` must be a live fit pointer; `out` must point to a writable
 * `TfGofResult`.
 */
enum TfStatus tf_ks_test(const struct TfFit *fit,
                         double alpha,
                         int bootstrap,
                         size_t reps,
                         uint64_t seed,
                         struct TfGofResult *out);

/**
 * Chi-square test on equiprobable bins (`bins = 0` selects automatically).
 *
 * # Safety
 * Same contract as [`tf_ks_test`].
 */
enum TfStatus tf_chi_square_test(const struct TfFit *fit,
                                 double alpha,
                                 size_t bins,
                                 int bootstrap,
                                 size_t reps,
                                 uint64_t seed,
                                 struct TfGofResult *out);

/**
 * Anderson-Darling test; the p-value is always a parametric bootstrap.
 *
 * # Safety
 * Same contract as [`tf_ks_test`].
 */
enum TfStatus tf_ad_test(const struct TfFit *fit,
                         double alpha,
                         size_t reps,
                         uint64_t seed,
                         struct TfGofResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
