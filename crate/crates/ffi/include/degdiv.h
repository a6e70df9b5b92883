#ifndef DEGDIV_H
#define DEGDIV_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DegdivStatus {
  DEGDIV_STATUS_OK = 0,
  DEGDIV_STATUS_NULL_POINTER = 1,
  DEGDIV_STATUS_INVALID_ARGUMENT = 2,
  DEGDIV_STATUS_NOT_PRIME = 3,
  DEGDIV_STATUS_OVERFLOW = 4,
  DEGDIV_STATUS_UNCLASSIFIABLE = 5,
  DEGDIV_STATUS_PANIC = 6,
} DegdivStatus;

typedef enum DegdivClass {
  DEGDIV_CLASS_CONTAINS_SL = 0,
  DEGDIV_CLASS_BOREL = 1,
  DEGDIV_CLASS_SPLIT_NORMALIZER = 2,
  DEGDIV_CLASS_NONSPLIT_NORMALIZER = 3,
  DEGDIV_CLASS_EXCEPTIONAL_A4 = 4,
  DEGDIV_CLASS_EXCEPTIONAL_S4 = 5,
  DEGDIV_CLASS_EXCEPTIONAL_A5 = 6,
} DegdivClass;

typedef enum DegdivVerdict {
  DEGDIV_VERDICT_PASS = 0,
  DEGDIV_VERDICT_VIOLATION = 1,
  DEGDIV_VERDICT_NOT_APPLICABLE = 2,
} DegdivVerdict;

/**
 * Opaque subgroup of `GL_2(F_p)`.
 */
typedef struct DegdivSubgroup DegdivSubgroup;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or NULL. Valid until the
 * next call into this library from the same thread.
 */
const char *degdiv_last_error_message(void);

/**
 * Subgroup of `GL_2(F_p)` generated by `n_gens` matrices, read row-major
 * from `entries` as `4 * n_gens` integers.
 *
 * # Safety
 * `entries` must point to `4 * n_gens` readable `int64_t` (may be NULL when
 * `n_gens` is 0) and `out` must be writable.
 */
enum DegdivStatus degdiv_subgroup_new(uint32_t p,
                                      const int64_t *entries,
                                      size_t n_gens,
                                      struct DegdivSubgroup **out);

/**
 * # Safety
 * `h` must be NULL or a handle from [`degdiv_subgroup_new`] not yet freed.
 */
void degdiv_subgroup_free(struct DegdivSubgroup *h);

/**
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum DegdivStatus degdiv_subgroup_order(const struct DegdivSubgroup *h, uint64_t *out);

/**
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum DegdivStatus degdiv_subgroup_classify(const struct DegdivSubgroup *h, enum DegdivClass *out);

/**
 * `[F_p^* : det G]`.
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum DegdivStatus degdiv_subgroup_det_index(const struct DegdivSubgroup *h, uint64_t *out);

/**
 * Orbit-divisibility verdict for the subgroup.
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum DegdivStatus degdiv_subgroup_verify(const struct DegdivSubgroup *h, enum DegdivVerdict *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum DegdivStatus degdiv_euler_phi(uint64_t n, uint64_t *out);

/**
 * `#GL_m(Z/p^n) = c * p^exponent` with `p` not dividing `c`.
 *
 * # Safety
 * `c_out` and `exponent_out` must be writable.
 */
enum DegdivStatus degdiv_glm_order(uint32_t m,
                                   uint64_t p,
                                   uint32_t n,
                                   uint64_t *c_out,
                                   uint32_t *exponent_out);

/**
 * Genus of `X_1(N)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum DegdivStatus degdiv_genus_x1(uint64_t n, uint64_t *out);

/**
 * Least `M` such that every multiple of the gcd from `M` on is a sum of generators.
 *
 * # Safety
 * `generators` must point to `len` readable values and `out` must be writable.
 */
enum DegdivStatus degdiv_stable_bound(const uint64_t *generators, size_t len, uint64_t *out);

/**
 * CM divisibility constant `c(g)`; `OVERFLOW` when it exceeds 64 bits.
 *
 * # Safety
 * `out` must be writable.
 */
enum DegdivStatus degdiv_cm_constant(uint32_t g, uint64_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DEGDIV_H */
