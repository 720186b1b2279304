/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef ENTROFUNC_H
#define ENTROFUNC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EntrofuncStatus {
  ENTROFUNC_STATUS_OK = 0,
  ENTROFUNC_STATUS_INVALID_ARGUMENT = 1,
  ENTROFUNC_STATUS_INSUFFICIENT_SAMPLE = 2,
  ENTROFUNC_STATUS_INVALID_ORDER = 3,
  ENTROFUNC_STATUS_UNDEFINED_INTERVAL = 4,
  ENTROFUNC_STATUS_UNSUPPORTED = 5,
  ENTROFUNC_STATUS_COMBINATORIAL_EXPLOSION = 6,
  ENTROFUNC_STATUS_EMPTY_INPUT = 7,
  ENTROFUNC_STATUS_CONFIG = 8,
  ENTROFUNC_STATUS_NULL_POINTER = 9,
  ENTROFUNC_STATUS_PANIC = 10,
} EntrofuncStatus;

// Opaque sample handle.
typedef struct EntrofuncSample EntrofuncSample;

// Result of `entrofunc_analyze`. Flags are 1 when the optional part is present.
typedef struct EntrofuncReport {
  double q;
  double kappa_hat;
  double raw_k;
  int has_entropy;
  double h_hat;
  int has_interval;
  double ci_lower;
  double ci_upper;
  size_t n1;
  size_t n2;
  double epsilon;
} EntrofuncReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// Valid until the next call into this library from the same thread.
const char *entrofunc_last_error(void);

// Builds a continuous sample from `n` row-major points of dimension `dim`.
//
// # Safety
// `coords` must point to `n * dim` doubles; `out` must be writable.
enum EntrofuncStatus entrofunc_sample_continuous(const double *coords,
                                                 size_t n,
                                                 size_t dim,
                                                 struct EntrofuncSample **out);

// Builds a discrete sample from `n` row-major integer points of dimension `dim`.
//
// # Safety
// `coords` must point to `n * dim` integers; `out` must be writable.
enum EntrofuncStatus entrofunc_sample_discrete(const int64_t *coords,
                                               size_t n,
                                               size_t dim,
                                               struct EntrofuncSample **out);

// Releases a sample. Null is ignored.
//
// # Safety
// `sample` must come from a constructor above and not be used afterwards.
void entrofunc_sample_free(struct EntrofuncSample *sample);

// Number of observations, or 0 for null.
//
// # Safety
// `sample` must be null or a live handle.
size_t entrofunc_sample_len(const struct EntrofuncSample *sample);

// Dimension, or 0 for null.
//
// # Safety
// `sample` must be null or a live handle.
size_t entrofunc_sample_dim(const struct EntrofuncSample *sample);

// Estimate of `q_(r1,r2)`: normalized for continuous samples, exact coincidences
// for discrete ones (`epsilon` ignored). `y` may be null when unused.
//
// # Safety
// `x` must be a live handle, `y` null or live, `out` writable.
enum EntrofuncStatus entrofunc_estimate_q(const struct EntrofuncSample *x,
                                          const struct EntrofuncSample *y,
                                          uint32_t r1,
                                          uint32_t r2,
                                          double epsilon,
                                          double *out);

// Estimate, variance, entropy and, when `level` lies in (0,1), a confidence interval.
//
// # Safety
// `x` must be a live handle, `y` null or live, `out` writable.
enum EntrofuncStatus entrofunc_analyze(const struct EntrofuncSample *x,
                                       const struct EntrofuncSample *y,
                                       uint32_t r1,
                                       uint32_t r2,
                                       double epsilon,
                                       double level,
                                       struct EntrofuncReport *out);

// Variability `v = -log q_(1,1)`.
//
// # Safety
// `x` and `y` must be live handles, `out` writable.
enum EntrofuncStatus entrofunc_variability(const struct EntrofuncSample *x,
                                           const struct EntrofuncSample *y,
                                           double epsilon,
                                           double *out);

// Rényi entropy of integer order `s >= 2`.
//
// # Safety
// `x` must be a live handle, `out` writable.
enum EntrofuncStatus entrofunc_renyi_entropy(const struct EntrofuncSample *x,
                                             uint32_t s,
                                             double epsilon,
                                             double *out);

// Bregman distance `B_s` between the laws of X and Y, or the symmetrized `K_s`
// when `symmetrized` is non-zero.
//
// # Safety
// `x` and `y` must be live handles, `out` writable.
enum EntrofuncStatus entrofunc_bregman(const struct EntrofuncSample *x,
                                       const struct EntrofuncSample *y,
                                       uint32_t s,
                                       double epsilon,
                                       int symmetrized,
                                       double *out);

// Expected ε-join size `m1 m2 ε^d b_1(d) e^{-v}`.
//
// # Safety
// `out` must be writable.
enum EntrofuncStatus entrofunc_join_size(uint64_t m1,
                                         uint64_t m2,
                                         double epsilon,
                                         size_t dim,
                                         double variability,
                                         double *out);

// Rate-based bandwidth for Hölder smoothness `alpha` and constant `c`.
//
// # Safety
// `out` must be writable.
enum EntrofuncStatus entrofunc_select_epsilon(size_t n,
                                              size_t dim,
                                              uint32_t r,
                                              double alpha,
                                              double c,
                                              double *out);

// One-sample Kolmogorov-Smirnov test against N(0,1).
//
// # Safety
// `values` must point to `n` doubles; `statistic` and `p_value` writable.
enum EntrofuncStatus entrofunc_ks_test(const double *values,
                                       size_t n,
                                       double *statistic,
                                       double *p_value);

// Reference `q_(r1,r2)` for catalog distributions written as e.g.
// `"gaussian1d(0,1.5)"` or `"bernoulliProduct(3,0.8)"`. `dist_y` may be null.
//
// # Safety
// `dist_x` must be a NUL-terminated string, `dist_y` null or one, `out` writable.
enum EntrofuncStatus entrofunc_true_q(const char *dist_x,
                                      const char *dist_y,
                                      uint32_t r1,
                                      uint32_t r2,
                                      double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ENTROFUNC_H */
