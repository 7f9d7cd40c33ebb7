#ifndef FPE_SIMILARITY_H
#define FPE_SIMILARITY_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  FPE_STATUS_OK = 0,
  FPE_STATUS_NULL_POINTER = 1,
  FPE_STATUS_INVALID_INPUT = 2,
  /**
   * No normalizable solution for these parameters.
   */
  FPE_STATUS_UNNORMALIZABLE = 3,
  /**
   * The operation does not apply to this family or input.
   */
  FPE_STATUS_UNSUPPORTED = 4,
  FPE_STATUS_NUMERICAL = 5,
  FPE_STATUS_PANIC = 6,
} FpeStatus;

typedef enum {
  FPE_SYMMETRY_MIRROR_MU2 = 0,
  FPE_SYMMETRY_CONJUGATE_PARAMS = 1,
  FPE_SYMMETRY_RATIO_RESCALE = 2,
  FPE_SYMMETRY_TIME_INVERSION = 3,
} FpeSymmetry;

/**
 * Opaque solution handle.
 */
typedef struct FpeSolution FpeSolution;

typedef struct {
  double peak_location;
  double peak_value;
  /**
   * NaN when the half maximum is not reached on both sides.
   */
  double fwhm;
  double mean;
  double variance;
} FpeProfileStats;

typedef struct {
  double a;
  double b;
  double c;
  double d;
  double e;
  double alpha;
} FpeExponents;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread. Valid until the next
 * failing call on the same thread; empty if none failed yet.
 */
const char *fpe_last_error(void);

/**
 * # Safety
 * `out` must be a valid pointer to writable storage.
 */
FpeStatus fpe_gaussian_new(double alpha, double mu1, double mu2, double mu4, FpeSolution **out);

/**
 * # Safety
 * `out` must be a valid pointer to writable storage.
 */
FpeStatus fpe_exponential_new(double alpha, double mu2, double mu4, FpeSolution **out);

/**
 * # Safety
 * `out` must be a valid pointer to writable storage.
 */
FpeStatus fpe_gamma_new(double alpha, double mu1, double mu2, double mu3, FpeSolution **out);

/**
 * # Safety
 * `h` must be null or a handle from this library that was not freed yet.
 */
void fpe_solution_free(FpeSolution *h);

/**
 * Density W(x, t); zero outside the support.
 *
 * # Safety
 * `h` must be a live handle and `out` a valid pointer.
 */
FpeStatus fpe_solution_density(const FpeSolution *h, double x, double t, double *out);

/**
 * Probability current J(x, t).
 *
 * # Safety
 * `h` must be a live handle and `out` a valid pointer.
 */
FpeStatus fpe_solution_current(const FpeSolution *h, double x, double t, double *out);

/**
 * Cumulative distribution at x.
 *
 * # Safety
 * `h` must be a live handle and `out` a valid pointer.
 */
FpeStatus fpe_solution_cdf(const FpeSolution *h, double x, double t, double *out);

/**
 * # Safety
 * `h` must be a live handle and `out` a valid pointer.
 */
FpeStatus fpe_solution_quantile(const FpeSolution *h, double u, double t, double *out);

/**
 * # Safety
 * `h` must be a live handle and `out` a valid pointer.
 */
FpeStatus fpe_solution_stats(const FpeSolution *h, double t, FpeProfileStats *out);

/**
 * Applies a symmetry (an `FpeSymmetry` value) and returns a new handle.
 * `k` is only read for `RatioRescale`.
 *
 * # Safety
 * `h` must be a live handle and `out` a valid pointer.
 */
FpeStatus fpe_solution_apply_symmetry(const FpeSolution *h,
                                      uint32_t symmetry,
                                      double k,
                                      FpeSolution **out);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
FpeStatus fpe_solve_exponents(double a, double d, double e, FpeExponents *out);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
FpeStatus fpe_crossing_time(double mu1, double *out);

/**
 * Tests `P y'' + Q y' + R y = 0` for reducibility to a Fokker-Planck
 * equation. Coefficients are in ascending powers of z.
 *
 * # Safety
 * Each array must hold at least the given number of values; `out` must be valid.
 */
FpeStatus fpe_qes_check(const double *p,
                        size_t n_p,
                        const double *q,
                        size_t n_q,
                        const double *r,
                        size_t n_r,
                        bool *out_reducible);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FPE_SIMILARITY_H */
