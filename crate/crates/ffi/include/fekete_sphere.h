#ifndef FEKETE_SPHERE_H
#define FEKETE_SPHERE_H

/* Generated by cbindgen from the fekete-sphere-ffi crate; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FsStatus {
  FS_STATUS_OK = 0,
  FS_STATUS_NULL_POINTER = 1,
  FS_STATUS_INVALID_ARGUMENT = 2,
  FS_STATUS_DIMENSION_MISMATCH = 3,
  FS_STATUS_UNSUPPORTED_DIMENSION = 4,
  FS_STATUS_SINGULAR = 5,
  FS_STATUS_IO = 6,
  FS_STATUS_PARSE = 7,
  FS_STATUS_MISSING_DEGREE = 8,
  FS_STATUS_OVERFLOW = 9,
  FS_STATUS_BUFFER_TOO_SMALL = 10,
  FS_STATUS_PANIC = 11,
  FS_STATUS_INTERNAL = 12,
} FsStatus;

/**
 * Cardinal functions of a fundamental system.
 */
typedef struct FsCardinalBasis FsCardinalBasis;

/**
 * A set of points on S¹ or S², optionally carrying the solver log.
 */
typedef struct FsPointSet FsPointSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *fs_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *fs_version(void);

/**
 * π_L, the dimension of polynomials of degree ≤ L on S^d.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum FsStatus fs_space_dimension(size_t d, size_t degree, size_t *out);

/**
 * Computes Fekete points of degree L on S^d with the default solver
 * settings and the given seed.
 *
 * # Safety
 * `out` must be valid for one write; the handle is released with
 * [`fs_point_set_free`].
 */
enum FsStatus fs_fekete_points(size_t d, size_t degree, uint64_t seed, struct FsPointSet **out);

/**
 * Builds a point set from `n` rows of `d + 1` coordinates (row major).
 * Rows are normalized; zero rows and exact duplicates are rejected.
 *
 * # Safety
 * `coords` must point to `n * (d + 1)` readable doubles and `out` must be
 * valid for one write.
 */
enum FsStatus fs_point_set_new(size_t d, const double *coords, size_t n, struct FsPointSet **out);

/**
 * Reads a point file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` valid for one write.
 */
enum FsStatus fs_point_set_read(const char *path, struct FsPointSet **out);

/**
 * Writes a point file.
 *
 * # Safety
 * `set` must be a live handle and `path` a NUL-terminated string.
 */
enum FsStatus fs_point_set_write(const struct FsPointSet *set, const char *path);

/**
 * Number of points, or 0 for NULL.
 *
 * # Safety
 * `set` must be NULL or a live handle.
 */
size_t fs_point_set_len(const struct FsPointSet *set);

/**
 * Sphere dimension d, or 0 for NULL.
 *
 * # Safety
 * `set` must be NULL or a live handle.
 */
size_t fs_point_set_dim(const struct FsPointSet *set);

/**
 * Copies the coordinates (row major, `len * (d + 1)` doubles) into `buf`.
 *
 * # Safety
 * `set` must be a live handle and `buf` writable for `buf_len` doubles.
 */
enum FsStatus fs_point_set_coords(const struct FsPointSet *set, double *buf, size_t buf_len);

/**
 * Solver log as JSON for sets produced by [`fs_fekete_points`], else NULL.
 * The string lives as long as the handle.
 *
 * # Safety
 * `set` must be NULL or a live handle.
 */
const char *fs_point_set_log_json(const struct FsPointSet *set);

/**
 * # Safety
 * `set` must be NULL or a handle not yet freed.
 */
void fs_point_set_free(struct FsPointSet *set);

/**
 * log|det V| of the degree-L Vandermonde matrix of a set of π_L points;
 * −∞ when singular.
 *
 * # Safety
 * `set` must be a live handle and `out` valid for one write.
 */
enum FsStatus fs_logabsdet(const struct FsPointSet *set, size_t degree, double *out);

/**
 * Minimal pairwise geodesic distance.
 *
 * # Safety
 * `set` must be a live handle and `out` valid for one write.
 */
enum FsStatus fs_separation(const struct FsPointSet *set, double *out);

/**
 * Extreme eigenvalues A ≤ B of the normalized Gram matrix for degree L.
 *
 * # Safety
 * `set` must be a live handle; `lower` and `upper` valid for one write.
 */
enum FsStatus fs_frame_bounds(const struct FsPointSet *set,
                              size_t degree,
                              double *lower,
                              double *upper);

/**
 * Cardinal functions of degree L on a set of π_L points.
 *
 * # Safety
 * `set` must be a live handle and `out` valid for one write; the result
 * is released with [`fs_cardinal_basis_free`].
 */
enum FsStatus fs_cardinal_basis_new(const struct FsPointSet *set,
                                    size_t degree,
                                    struct FsCardinalBasis **out);

/**
 * Number of cardinal functions (π_L), or 0 for NULL.
 *
 * # Safety
 * `basis` must be NULL or a live handle.
 */
size_t fs_cardinal_basis_len(const struct FsCardinalBasis *basis);

/**
 * Evaluates every ℓ_i at the point `z` (d + 1 coordinates, normalized on
 * input) into `out`.
 *
 * # Safety
 * `basis` must be a live handle, `z` readable for d + 1 doubles and `out`
 * writable for `out_len` doubles.
 */
enum FsStatus fs_cardinal_eval(const struct FsCardinalBasis *basis,
                               const double *z,
                               double *out,
                               size_t out_len);

/**
 * # Safety
 * `basis` must be NULL or a handle not yet freed.
 */
void fs_cardinal_basis_free(struct FsCardinalBasis *basis);

/**
 * Fejes Tóth bound on S²: ω_L and the distance bound d_L.
 *
 * # Safety
 * `omega` and `d_l` must be valid for one write.
 */
enum FsStatus fs_fejes_toth_bound(size_t degree, double *omega, double *d_l);

/**
 * κ = 4·(π/√12)^{1/2}.
 */
double fs_molnar_kappa(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FEKETE_SPHERE_H */
