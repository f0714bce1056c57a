#ifndef UNIREGRESS_H
#define UNIREGRESS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum UrStatus {
  UR_STATUS_OK = 0,
  UR_STATUS_NULL_POINTER = 1,
  UR_STATUS_INVALID_ARGUMENT = 2,
  UR_STATUS_INVALID_UTF8 = 3,
  UR_STATUS_UNKNOWN_SCENARIO = 4,
  UR_STATUS_COMPONENT_MISMATCH = 5,
  UR_STATUS_IO = 6,
  UR_STATUS_CORRUPTED_STATE = 7,
  UR_STATUS_INTERNAL = 8,
  UR_STATUS_PANIC = 9,
} UrStatus;

/*
 `(1+δ)C1NN` on real instances with real responses.
 */
typedef struct UrC1nn UrC1nn;

/*
 Mean estimation on the real line with loss `|a-b|^alpha`.
 */
typedef struct UrMeanEstimator UrMeanEstimator;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Copies the calling thread's last error message into `buf` (NUL-terminated,
 truncated to `len`). Returns the full message length in bytes, excluding
 the terminator.

 # Safety
 `buf` must be null or valid for `len` writable bytes.
 */
size_t ur_last_error_message(char *buf, size_t len);

/*
 # Safety
 `out` must be valid for one pointer write.
 */
enum UrStatus ur_mean_estimator_new(double alpha, uint64_t seed, struct UrMeanEstimator **out);

/*
 # Safety
 `handle` must come from [`ur_mean_estimator_new`]; `out` must be writable.
 */
enum UrStatus ur_mean_estimator_predict(struct UrMeanEstimator *handle, double *out);

/*
 # Safety
 `handle` must come from [`ur_mean_estimator_new`].
 */
enum UrStatus ur_mean_estimator_observe(struct UrMeanEstimator *handle, double y);

/*
 # Safety
 `handle` must be null or come from [`ur_mean_estimator_new`], and is
 invalid afterwards.
 */
void ur_mean_estimator_free(struct UrMeanEstimator *handle);

/*
 # Safety
 `out` must be valid for one pointer write.
 */
enum UrStatus ur_c1nn_new(double delta,
                          double default_prediction,
                          uint64_t seed,
                          struct UrC1nn **out);

/*
 # Safety
 `handle` must come from [`ur_c1nn_new`]; `out` must be writable.
 */
enum UrStatus ur_c1nn_predict(struct UrC1nn *handle, double x, double *out);

/*
 # Safety
 `handle` must come from [`ur_c1nn_new`].
 */
enum UrStatus ur_c1nn_observe(struct UrC1nn *handle, double y);

/*
 # Safety
 `handle` must be null or come from [`ur_c1nn_new`], and is invalid
 afterwards.
 */
void ur_c1nn_free(struct UrC1nn *handle);

/*
 Loss between two points of the pathological countable space.
 */
double ur_patho_loss(uint64_t i, uint64_t j);

/*
 # Safety
 `out` must be writable.
 */
enum UrStatus ur_relaxed_triangle_constant(double alpha, double eps, double *out);

/*
 Runs a registered scenario, writes the CSV to `out_path` (and the JSON
 summary beside it) and stores the final average excess in `excess_out`.
 `out_path` and `excess_out` may be null.

 # Safety
 `scenario` must be a NUL-terminated string; `out_path` null or one;
 `excess_out` null or writable.
 */
enum UrStatus ur_run_scenario(const char *scenario,
                              size_t horizon,
                              size_t replicas,
                              uint64_t seed,
                              const char *out_path,
                              double *excess_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UNIREGRESS_H */
