#ifndef PARAMODULAR_H
#define PARAMODULAR_H

#include <stdbool.h>
#include <stdint.h>

typedef enum PmStatus {
  PM_STATUS_OK = 0,
  PM_STATUS_NULL_POINTER = 1,
  PM_STATUS_INVALID_ARGUMENT = 2,
  PM_STATUS_PARSE = 3,
  /**
   * The computation ran but its mathematical precondition failed, for
   * example a Hecke image with a non-cancelling fractional index.
   */
  PM_STATUS_MATH = 4,
  PM_STATUS_PANIC = 5,
} PmStatus;

/**
 * A truncated paramodular Fourier expansion.
 */
typedef struct PmExpansion PmExpansion;

/**
 * A truncated Jacobi form expansion.
 */
typedef struct PmJacobi PmJacobi;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failing call on this thread, or NULL. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *pm_last_error_message(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` is NULL or a string obtained from this library, not yet freed.
 */
void pm_string_free(char *s);

/**
 * # Safety
 * `h` is NULL or a handle from this library, not yet freed.
 */
void pm_expansion_free(struct PmExpansion *h);

/**
 * # Safety
 * `h` is NULL or a handle from this library, not yet freed.
 */
void pm_jacobi_free(struct PmJacobi *h);

/**
 * The Eisenstein series of weight `k` and level `level` on the box
 * `n <= n_max`, `m <= m_max`.
 *
 * # Safety
 * `out` is a valid pointer.
 */
enum PmStatus pm_eisenstein(int64_t k,
                            int64_t level,
                            int64_t n_max,
                            int64_t m_max,
                            struct PmExpansion **out);

/**
 * Parses a paramodular expansion from its JSON text.
 *
 * # Safety
 * `json` is a nul-terminated string and `out` a valid pointer.
 */
enum PmStatus pm_expansion_from_json(const char *json, struct PmExpansion **out);

/**
 * # Safety
 * `h` is a live handle and `out` a valid pointer; free the result with
 * [`pm_string_free`].
 */
enum PmStatus pm_expansion_to_json(const struct PmExpansion *h, char **out);

/**
 * Weight, level and box of an expansion. Any out pointer may be NULL.
 *
 * # Safety
 * `h` is a live handle; non-NULL out pointers are valid.
 */
enum PmStatus pm_expansion_info(const struct PmExpansion *h,
                                int64_t *weight,
                                int64_t *level,
                                int64_t *n_max,
                                int64_t *m_max);

/**
 * The coefficient at `(n, r, m)` as `"num/den"`. Indices outside the box are
 * an error.
 *
 * # Safety
 * `h` is a live handle and `out` a valid pointer; free the result with
 * [`pm_string_free`].
 */
enum PmStatus pm_expansion_coeff(const struct PmExpansion *h,
                                 int64_t n,
                                 int64_t r,
                                 int64_t m,
                                 char **out);

/**
 * Sets `*passed` to whether the expansion satisfies the Maass relations on
 * its box.
 *
 * # Safety
 * `h` is a live handle and `passed` a valid pointer.
 */
enum PmStatus pm_maass_check(const struct PmExpansion *h, bool *passed);

/**
 * Applies the operator named `op` (`identity`, `tnq`, `tstarq`, `fjraise`,
 * `jdiag`, `l1diag`, `usum`) at `q`. A negative `n_max` or `m_max` selects
 * the largest box the input determines.
 *
 * # Safety
 * `h` is a live handle, `op` a nul-terminated string and `out` a valid
 * pointer.
 */
enum PmStatus pm_hecke_apply(const struct PmExpansion *h,
                             const char *op,
                             int64_t q,
                             int64_t n_max,
                             int64_t m_max,
                             struct PmExpansion **out);

/**
 * Eigenvalue of the operator on the expansion as `"num/den"`. A form that is
 * not an eigenform gives [`PmStatus::Math`].
 *
 * # Safety
 * As for [`pm_hecke_apply`], with `out` receiving a string to free with
 * [`pm_string_free`].
 */
enum PmStatus pm_hecke_eigenvalue(const struct PmExpansion *h,
                                  const char *op,
                                  int64_t q,
                                  int64_t n_max,
                                  int64_t m_max,
                                  char **out);

/**
 * Parses a Jacobi form expansion from its JSON text.
 *
 * # Safety
 * `json` is a nul-terminated string and `out` a valid pointer.
 */
enum PmStatus pm_jacobi_from_json(const char *json, struct PmJacobi **out);

/**
 * # Safety
 * `h` is a live handle and `out` a valid pointer; free the result with
 * [`pm_string_free`].
 */
enum PmStatus pm_jacobi_to_json(const struct PmJacobi *h, char **out);

/**
 * The lift of a Jacobi form of index `level` on the given box.
 *
 * # Safety
 * `h` is a live handle and `out` a valid pointer.
 */
enum PmStatus pm_lift(const struct PmJacobi *h,
                      int64_t level,
                      int64_t n_max,
                      int64_t m_max,
                      struct PmExpansion **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PARAMODULAR_H */
