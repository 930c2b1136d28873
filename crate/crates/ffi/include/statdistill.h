#ifndef STATDISTILL_H
#define STATDISTILL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define SD_FERMION 0

#define SD_BOSON 1

typedef enum SdStatus {
  SD_STATUS_OK = 0,
  SD_STATUS_NULL_POINTER = 1,
  SD_STATUS_NOT_NORMALIZED = 2,
  SD_STATUS_NEGATIVE_WEIGHT = 3,
  SD_STATUS_NOT_PSD = 4,
  SD_STATUS_NON_FINITE = 5,
  SD_STATUS_INVALID_STATISTICS = 6,
  SD_STATUS_TOO_MANY_STEPS = 7,
  SD_STATUS_DEGENERATE_STEP = 8,
  SD_STATUS_INVALID_STATE = 9,
  SD_STATUS_OUT_OF_RANGE = 10,
  SD_STATUS_INTERNAL = 11,
} SdStatus;

/**
 * Outcome of a protocol run.
 */
typedef struct SdProtocolResult SdProtocolResult;

typedef struct SdSummary {
  double initial_concurrence;
  /**
   * `|c|²/ab`; NaN when `ab = 0`.
   */
  double asymptotic_concurrence;
  double asymptotic_probability;
  /**
   * Asymptote minus initial concurrence; NaN when `ab = 0`.
   */
  double gain;
  bool distillable;
} SdSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Runs `n` protocol steps on the pair `[[a, c], [c*, b]]` and stores a new
 * handle in `*out`.
 *
 * # Safety
 * `out` must be null or valid for writing one pointer.
 */
enum SdStatus sd_distill(double a,
                         double b,
                         double c_re,
                         double c_im,
                         uint32_t n,
                         uint32_t statistics_code,
                         struct SdProtocolResult **out);

/**
 * Releases a handle from [`sd_distill`]. Null is ignored.
 *
 * # Safety
 * `handle` must be null or a live handle not freed before.
 */
void sd_result_free(struct SdProtocolResult *handle);

/**
 * Cumulative success probability `p_f`.
 *
 * # Safety
 * `handle` must be null or live; `out` must be null or writable.
 */
enum SdStatus sd_result_probability(const struct SdProtocolResult *handle, double *out);

/**
 * Number of steps performed.
 *
 * # Safety
 * `handle` must be null or live; `out` must be null or writable.
 */
enum SdStatus sd_result_num_steps(const struct SdProtocolResult *handle, uint32_t *out);

/**
 * Probability of step `k` (zero-based) given that the earlier steps
 * succeeded.
 *
 * # Safety
 * `handle` must be null or live; `out` must be null or writable.
 */
enum SdStatus sd_result_step_probability(const struct SdProtocolResult *handle,
                                         uint32_t k,
                                         double *out);

/**
 * Concurrence after `k` steps, `0 <= k <= n`.
 *
 * # Safety
 * `handle` must be null or live; `out` must be null or writable.
 */
enum SdStatus sd_result_concurrence(const struct SdProtocolResult *handle, uint32_t k, double *out);

/**
 * Concurrence of the final state.
 *
 * # Safety
 * `handle` must be null or live; `out` must be null or writable.
 */
enum SdStatus sd_result_final_concurrence(const struct SdProtocolResult *handle, double *out);

/**
 * Final 4×4 state, row-major, split into real and imaginary parts.
 *
 * # Safety
 * `handle` must be null or live; `re` and `im` must be null or each
 * writable for 16 doubles.
 */
enum SdStatus sd_result_final_state(const struct SdProtocolResult *handle, double *re, double *im);

/**
 * Wootters concurrence of a row-major 4×4 density matrix.
 *
 * # Safety
 * `re` and `im` must be null or each readable for 16 doubles; `out` must be
 * null or writable.
 */
enum SdStatus sd_concurrence(const double *re, const double *im, double *out);

/**
 * Initial and asymptotic figures of merit for one pair.
 *
 * # Safety
 * `out` must be null or writable.
 */
enum SdStatus sd_summarize(double a, double b, double c_re, double c_im, struct SdSummary *out);

/**
 * Static, NUL-terminated description of a status code. Takes the raw
 * integer so that out-of-range values from C stay well defined.
 */
const char *sd_status_message(int status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STATDISTILL_H */
