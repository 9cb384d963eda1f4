#ifndef LADDER_CS_H
#define LADDER_CS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

#define LCS_VARIANT_NONLINEAR 0

#define LCS_VARIANT_LINEARIZED 1

#define LCS_METHOD_CLOSED_FORM 0

#define LCS_METHOD_DIRECT 1

enum LcsStatus
#ifdef __cplusplus
  : int32_t
#endif // __cplusplus
 {
  LCS_STATUS_OK = 0,
  LCS_STATUS_INVALID_ARGUMENT = 1,
  LCS_STATUS_NUMERICAL_FAILURE = 2,
  LCS_STATUS_NULL_POINTER = 3,
  LCS_STATUS_PANIC = 4,
  LCS_STATUS_BUFFER_TOO_SMALL = 5,
};
#ifndef __cplusplus
typedef int32_t LcsStatus;
#endif // __cplusplus

/**
 * Opaque coherent state with its truncated coefficients.
 */
typedef struct LcsState LcsState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a coherent state. `tail_tol` must lie in (0, 1e-8].
 *
 * # Safety
 * `out` must be valid for writing one pointer. The handle must be released
 * with [`lcs_state_free`].
 */
LcsStatus lcs_state_new(int32_t variant_code,
                        uint32_t m,
                        int64_t mu,
                        double z_re,
                        double z_im,
                        double tail_tol,
                        struct LcsState **out);

/**
 * Releases a handle from [`lcs_state_new`]. Null is ignored.
 *
 * # Safety
 * `state` must be null or a live handle not freed before.
 */
void lcs_state_free(struct LcsState *state);

/**
 * Number of retained coefficients K + 1.
 *
 * # Safety
 * `state` must be a live handle and `out` valid for writing.
 */
LcsStatus lcs_state_len(const struct LcsState *state, size_t *out);

/**
 * Upper bound on the coefficient mass discarded by truncation.
 *
 * # Safety
 * `state` must be a live handle and `out` valid for writing.
 */
LcsStatus lcs_state_tail_mass(const struct LcsState *state, double *out);

/**
 * Copies A_0..A_K into `re` and `im`, each of capacity `cap`. Fails with
 * BufferTooSmall when `cap` is below [`lcs_state_len`].
 *
 * # Safety
 * `re` and `im` must be valid for writing `cap` doubles.
 */
LcsStatus lcs_state_coefficients(const struct LcsState *state, double *re, double *im, size_t cap);

/**
 * |Ψ(x, t)|² at `n` points.
 *
 * # Safety
 * `xs` must be valid for reading and `out` for writing `n` doubles.
 */
LcsStatus lcs_state_density(const struct LcsState *state,
                            double t,
                            const double *xs,
                            double *out,
                            size_t n);

/**
 * ⟨H⟩ by closed form or direct sum.
 *
 * # Safety
 * `state` must be a live handle and `out` valid for writing.
 */
LcsStatus lcs_state_energy(const struct LcsState *state, int32_t method_code, double *out);

/**
 * Mandel Q of the ladder number operator.
 *
 * # Safety
 * `state` must be a live handle and `out` valid for writing.
 */
LcsStatus lcs_state_mandel_q(const struct LcsState *state, int32_t method_code, double *out);

/**
 * Linear entropy of one arm after a 50:50 beamsplitter with vacuum in the
 * other port, and its truncation error bound.
 *
 * # Safety
 * `state` must be a live handle; `value` and `error_bound` valid for writing.
 */
LcsStatus lcs_state_linear_entropy(const struct LcsState *state,
                                   double *value,
                                   double *error_bound);

/**
 * ⟨+z|-z⟩ for the nonlinear state of ladder μ.
 *
 * # Safety
 * `out` must be valid for writing.
 */
LcsStatus lcs_overlap(uint32_t m, int64_t mu, double abs_z, double *out);

/**
 * Matrix element a_ν of the annihilation operator.
 *
 * # Safety
 * `out` must be valid for writing.
 */
LcsStatus lcs_ladder_element(uint32_t m, int64_t nu, double *out);

/**
 * ψ_ν(x) or its first or second derivative.
 *
 * # Safety
 * `out` must be valid for writing.
 */
LcsStatus lcs_wavefunction(uint32_t m, int64_t nu, double x, uint8_t derivative, double *out);

/**
 * Copies the calling thread's last error message into `buf` (NUL
 * terminated, truncated to `cap`). Returns the full message length
 * including the terminator, or 0 when there is no message.
 *
 * # Safety
 * `buf` must be null or valid for writing `cap` bytes.
 */
size_t lcs_last_error_message(char *buf, size_t cap);

/**
 * Library version as a static NUL-terminated string.
 */
const char *lcs_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LADDER_CS_H */
