#ifndef TSAGG_H
#define TSAGG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum TsaggStatus {
  TSAGG_STATUS_OK = 0,
  TSAGG_STATUS_NULL_POINTER = 1,
  TSAGG_STATUS_INVALID_ARGUMENT = 2,
  TSAGG_STATUS_IO = 3,
  TSAGG_STATUS_INFEASIBLE = 4,
  TSAGG_STATUS_UNBOUNDED = 5,
  TSAGG_STATUS_NUMERICAL = 6,
  TSAGG_STATUS_INTERNAL = 7,
} TsaggStatus;

// Outcome of [`tsagg_lp_solve`].
typedef enum TsaggLpStatus {
  TSAGG_LP_STATUS_OPTIMAL = 0,
  TSAGG_LP_STATUS_INFEASIBLE = 1,
  TSAGG_LP_STATUS_UNBOUNDED = 2,
} TsaggLpStatus;

// Hour-to-cluster partition.
typedef struct TsaggClusterModel TsaggClusterModel;

// Dispatch system: generators, demand and capacity-factor series.
typedef struct TsaggSystem TsaggSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failure on this thread; empty after a
// successful call. The pointer stays valid until the next library call.
const char *tsagg_last_error(void);

// Release a string returned by the library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void tsagg_string_free(char *s);

// Load a system from a JSON config file. With `strict` nonzero, unknown
// config keys are an error; otherwise they are logged and ignored.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum TsaggStatus tsagg_system_load(const char *path, int32_t strict, struct TsaggSystem **out);

// Build the built-in synthetic wind/thermal/NSE system. `hours` of 0 means
// a full year.
//
// # Safety
// `out` must be writable.
enum TsaggStatus tsagg_system_synthetic(uint64_t seed, size_t hours, struct TsaggSystem **out);

// # Safety
// `system` must be null or a handle from this library, freed at most once.
void tsagg_system_free(struct TsaggSystem *system);

// Number of hours, or 0 for a null handle.
//
// # Safety
// `system` must be null or a live handle.
size_t tsagg_system_horizon(const struct TsaggSystem *system);

// Total cost of the full hourly dispatch.
//
// # Safety
// `system` must be a live handle; `cost` must be writable.
enum TsaggStatus tsagg_solve_full_cost(const struct TsaggSystem *system, double *cost);

// Group hours by their optimal dispatch basis.
//
// # Safety
// `system` must be a live handle; `out` must be writable.
enum TsaggStatus tsagg_basis_cluster(const struct TsaggSystem *system,
                                     struct TsaggClusterModel **out);

// k-means on normalized demand and capacity factors.
//
// # Safety
// `system` must be a live handle; `out` must be writable.
enum TsaggStatus tsagg_kmeans(const struct TsaggSystem *system,
                              size_t k,
                              uint64_t seed,
                              struct TsaggClusterModel **out);

// # Safety
// `model` must be null or a handle from this library, freed at most once.
void tsagg_cluster_model_free(struct TsaggClusterModel *model);

// Number of clusters, or 0 for a null handle.
//
// # Safety
// `model` must be null or a live handle.
size_t tsagg_cluster_model_k(const struct TsaggClusterModel *model);

// Copy the cluster index of each hour into `buf`, which must hold at least
// `tsagg_system_horizon` entries; `len` is its capacity.
//
// # Safety
// `model` must be a live handle; `buf` must be writable for `len` entries.
enum TsaggStatus tsagg_cluster_model_assignment(const struct TsaggClusterModel *model,
                                                size_t *buf,
                                                size_t len);

// Run k-means and basis-oriented aggregation and return both reports as a
// JSON array `[kmeans, basis]`. Free the string with [`tsagg_string_free`].
//
// # Safety
// `system` must be a live handle; `out` must be writable.
enum TsaggStatus tsagg_compare_json(const struct TsaggSystem *system, uint64_t seed, char **out);

// Solve `min cᵀx s.t. Ax = b, x ≥ 0` with `A` given row-major as `m × n`.
// On success `x` (length `n`) and `objective` hold the optimum when
// `status` is optimal; they are left untouched otherwise.
//
// # Safety
// `c` and `x` must hold `n` values, `a` `m·n`, `b` `m`; outputs writable.
enum TsaggStatus tsagg_lp_solve(size_t m,
                                size_t n,
                                const double *c,
                                const double *a,
                                const double *b,
                                double *x,
                                double *objective,
                                enum TsaggLpStatus *status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TSAGG_H */
