#ifndef RZL_H
#define RZL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RzlStatus {
  RZL_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  RZL_STATUS_NULL_POINTER = 1,
  /**
   * Bad arguments or violated preconditions.
   */
  RZL_STATUS_PRECONDITION = 2,
  /**
   * Accuracy, conditioning or root-quality failure.
   */
  RZL_STATUS_NUMERICAL = 3,
  RZL_STATUS_IO = 4,
  /**
   * The output buffer is too small; the required size is still reported.
   */
  RZL_STATUS_BUFFER_TOO_SMALL = 5,
  /**
   * A Rust panic was caught at the boundary.
   */
  RZL_STATUS_PANIC = 6,
} RzlStatus;

/**
 * Norm table handle.
 */
typedef struct RzlNormTable RzlNormTable;

/**
 * Boundary profile handle.
 */
typedef struct RzlProfile RzlProfile;

typedef struct RzlComplex {
  double re;
  double im;
} RzlComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *rzl_last_error(void);

/**
 * `F_m(t) = ∫₀¹ e^{ty} yᵐ dy`.
 *
 * # Safety
 * `out` must be null or valid for one write.
 */
enum RzlStatus rzl_eval_f(size_t m, struct RzlComplex t, struct RzlComplex *out);

/**
 * `(log F_m)″(s)`.
 *
 * # Safety
 * `out` must be null or valid for one write.
 */
enum RzlStatus rzl_log_f_dd(size_t m, struct RzlComplex s, struct RzlComplex *out);

/**
 * Limit density `D^∞` for boundary data `(m, t0, ‖P‖², β(P))` at `β(u)`.
 *
 * # Safety
 * `out` must be null or valid for one write.
 */
enum RzlStatus rzl_density_limit(size_t m,
                                 struct RzlComplex t0,
                                 double p_norm_sq,
                                 struct RzlComplex beta_of_p,
                                 struct RzlComplex beta_u,
                                 double *out);

/**
 * Limit pair correlation `K^∞` and its normalized form `K̃^∞`.
 *
 * # Safety
 * `k_inf` and `k_tilde_inf` must be null or valid for one write.
 */
enum RzlStatus rzl_pair_limit(size_t m,
                              struct RzlComplex t0,
                              double p_norm_sq,
                              struct RzlComplex beta_of_p,
                              struct RzlComplex beta_u,
                              double *k_inf,
                              double *k_tilde_inf);

/**
 * Parses `circle`, `sphere[:dim]`, `ellipsoid:a0,a1,...` or
 * `pellipsoid:p0,p1,...`.
 *
 * # Safety
 * `spec` must be null or a NUL-terminated string; `out` must be null or
 * valid for one write.
 */
enum RzlStatus rzl_profile_parse(const char *spec, struct RzlProfile **out);

/**
 * Number of complex coordinates, or 0 for a null handle.
 *
 * # Safety
 * `profile` must be null or a live handle.
 */
size_t rzl_profile_dim(const struct RzlProfile *profile);

/**
 * # Safety
 * `profile` must be null or a handle not yet freed.
 */
void rzl_profile_free(struct RzlProfile *profile);

/**
 * `β(u)` at the boundary point `z`.
 *
 * # Safety
 * `z` and `u` must point to `dim` values; `out` must be valid for one write.
 */
enum RzlStatus rzl_beta(const struct RzlProfile *profile,
                        const struct RzlComplex *z,
                        const struct RzlComplex *u,
                        size_t dim,
                        struct RzlComplex *out);

/**
 * Norm table of degree `n` for the profile's boundary measure.
 *
 * # Safety
 * `profile` must be null or a live handle; `out` must be valid for one write.
 */
enum RzlStatus rzl_norms_compute(const struct RzlProfile *profile,
                                 size_t n,
                                 size_t quad_order,
                                 struct RzlNormTable **out);

/**
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be valid for one write.
 */
enum RzlStatus rzl_norms_load(const char *path, struct RzlNormTable **out);

/**
 * # Safety
 * `table` must be a live handle; `path` a NUL-terminated string.
 */
enum RzlStatus rzl_norms_save(const struct RzlNormTable *table, const char *path);

/**
 * Number of multi-indices in the table, or 0 for a null handle.
 *
 * # Safety
 * `table` must be null or a live handle.
 */
size_t rzl_norms_len(const struct RzlNormTable *table);

/**
 * Top degree of the table, or 0 for a null handle.
 *
 * # Safety
 * `table` must be null or a live handle.
 */
size_t rzl_norms_degree(const struct RzlNormTable *table);

/**
 * # Safety
 * `table` must be null or a handle not yet freed.
 */
void rzl_norms_free(struct RzlNormTable *table);

/**
 * Finite-degree zero density `D_N(z + u/N)`.
 *
 * # Safety
 * `z` and `u` must point to `dim` values; `out` must be valid for one write.
 */
enum RzlStatus rzl_density_n(const struct RzlNormTable *table,
                             const struct RzlComplex *z,
                             const struct RzlComplex *u,
                             size_t dim,
                             size_t n,
                             double *out);

/**
 * Finite-degree pair correlation between `z + u/N` and `z`.
 *
 * # Safety
 * `z` and `u` must point to `dim` values; `k_n` and `k_tilde_n` must be
 * valid for one write.
 */
enum RzlStatus rzl_pair_n(const struct RzlProfile *profile,
                          const struct RzlNormTable *table,
                          const struct RzlComplex *z,
                          const struct RzlComplex *u,
                          size_t dim,
                          size_t n,
                          double *k_n,
                          double *k_tilde_n);

/**
 * `S_N(z + u/N, z + v/N) / S_N(z, z)`.
 *
 * # Safety
 * `z`, `u`, `v` must point to `dim` values; `out` must be valid for one write.
 */
enum RzlStatus rzl_scaled_ratio(const struct RzlNormTable *table,
                                const struct RzlComplex *z,
                                const struct RzlComplex *u,
                                const struct RzlComplex *v,
                                size_t dim,
                                size_t n,
                                struct RzlComplex *out);

/**
 * Roots of `Σ coeffs[k] xᵏ`. `*count` receives the number of roots; if it
 * exceeds `capacity` nothing is written to `roots` and
 * [`RzlStatus::BufferTooSmall`] is returned.
 *
 * # Safety
 * `coeffs` must point to `len` values, `roots` to `capacity` writable
 * values (or be null when `capacity` is 0), `count` must be valid for one
 * write.
 */
enum RzlStatus rzl_find_roots(const struct RzlComplex *coeffs,
                              size_t len,
                              struct RzlComplex *roots,
                              size_t capacity,
                              size_t *count);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RZL_H */
