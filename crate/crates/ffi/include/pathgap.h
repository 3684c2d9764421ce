#ifndef PATHGAP_H
#define PATHGAP_H

/* Generated by cbindgen from crates/ffi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PathgapStatus {
  PATHGAP_STATUS_OK = 0,
  PATHGAP_STATUS_NULL_POINTER = 1,
  PATHGAP_STATUS_INVALID_ARGUMENT = 2,
  PATHGAP_STATUS_NO_CONVERGENCE = 3,
  PATHGAP_STATUS_BUFFER_TOO_SMALL = 4,
  PATHGAP_STATUS_PANIC = 5,
} PathgapStatus;

/**
 * Opaque operator handle.
 */
typedef struct PathgapOperator PathgapOperator;

typedef struct PathgapSpectrum {
  double lambda0;
  double lambda1;
  double gap;
  double residual;
  bool precision_limited;
} PathgapSpectrum;

/**
 * Bound values are NaN when the corresponding bound is unavailable.
 */
typedef struct PathgapBoundsSummary {
  double lambda0;
  double lambda1;
  double ground_lower;
  double ground_upper;
  double excited_lower;
  double excited_upper;
  size_t checks_total;
  size_t checks_applicable;
  size_t checks_failed;
  bool all_applicable_hold;
} PathgapBoundsSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread (empty if none). The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *pathgap_last_error(void);

/**
 * Static description of a status code.
 */
const char *pathgap_status_string(enum PathgapStatus status);

/**
 * Builds `H = L_k + Σ α_j δ_j`. With `len == 0` the potential is empty
 * (free Laplacian) and `sites`/`strengths` may be NULL.
 *
 * # Safety
 * `sites` and `strengths` must each point to `len` readable values when
 * `len > 0`; `out` must be a valid pointer.
 */
enum PathgapStatus pathgap_operator_new(size_t k,
                                        const int64_t *sites,
                                        const double *strengths,
                                        size_t len,
                                        struct PathgapOperator **out);

/**
 * Releases an operator. NULL is ignored.
 *
 * # Safety
 * `op` must come from [`pathgap_operator_new`] and not be freed twice.
 */
void pathgap_operator_free(struct PathgapOperator *op);

/**
 * Vertex count `2k + 1`, or 0 for NULL.
 *
 * # Safety
 * `op` must be NULL or a live handle.
 */
size_t pathgap_operator_len(const struct PathgapOperator *op);

/**
 * Number of eigenvalues strictly below `mu`.
 *
 * # Safety
 * `op` must be a live handle and `out` a valid pointer.
 */
enum PathgapStatus pathgap_sturm_count(const struct PathgapOperator *op, double mu, size_t *out);

/**
 * `index`-th smallest eigenvalue; `rel_tol <= 0` selects the default.
 *
 * # Safety
 * `op` must be a live handle and `out` a valid pointer.
 */
enum PathgapStatus pathgap_eigenvalue(const struct PathgapOperator *op,
                                      size_t index,
                                      double rel_tol,
                                      double *out);

/**
 * Lowest two eigenvalues and the gap.
 *
 * # Safety
 * `op` must be a live handle and `out` a valid pointer.
 */
enum PathgapStatus pathgap_spectrum_low(const struct PathgapOperator *op,
                                        struct PathgapSpectrum *out);

/**
 * Writes the positive normalized ground state (site order `-k..=k`) into
 * `buf`, which must hold at least `pathgap_operator_len(op)` values.
 *
 * # Safety
 * `op` must be a live handle and `buf` must point to `len` writable values.
 */
enum PathgapStatus pathgap_ground_state(const struct PathgapOperator *op, double *buf, size_t len);

/**
 * Evaluates every eigenvalue bound for the operator; `epsilon` is the
 * trial-state parameter and `k_min` the size below which the excited-state
 * sandwich is informational.
 *
 * # Safety
 * `op` must be a live handle and `out` a valid pointer.
 */
enum PathgapStatus pathgap_verify_bounds(const struct PathgapOperator *op,
                                         double epsilon,
                                         size_t k_min,
                                         struct PathgapBoundsSummary *out);

/**
 * `2 − 2 cos(π / (2m + 1))`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum PathgapStatus pathgap_dirichlet_ground_energy(size_t m, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PATHGAP_H */
