#ifndef BERGER_HELIX_H
#define BERGER_HELIX_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum BhStatus {
  BH_STATUS_OK = 0,
  BH_STATUS_NULL_POINTER = 1,
  BH_STATUS_INVALID_ARGUMENT = 2,
  BH_STATUS_OUT_OF_DOMAIN = 3,
  BH_STATUS_DEGENERATE = 4,
  BH_STATUS_VERIFICATION_FAILED = 5,
  BH_STATUS_PANIC = 6,
} BhStatus;

/**
 * Opaque surface handle.
 */
typedef struct BhSurface BhSurface;

/**
 * Closed-form constants of a parameter pair.
 */
typedef struct BhConstants {
  double b;
  double alpha1;
  double alpha2;
  double g11;
  double g33;
  double c1;
  double c2;
  double a_tilde;
  double b_tilde;
  double d;
  double e;
  double i;
  double gauss_k;
  double slope;
} BhConstants;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread; empty after a success.
 * Valid until the next call into the library from the same thread.
 */
const char *bh_last_error(void);

/**
 * Fills `out` with the constants of (epsilon, theta).
 *
 * # Safety
 * `out` must be null or point to writable `BhConstants`.
 */
enum BhStatus bh_constants(double epsilon, double theta, struct BhConstants *out);

/**
 * Surface of the profile ξ = π/2, ξ1 = π/4, ξ2 = ξ3 = v on `[v_min, v_max]`.
 *
 * # Safety
 * `out` must be null or point to writable storage for a handle.
 */
enum BhStatus bh_surface_new_example(double epsilon,
                                     double theta,
                                     double v_min,
                                     double v_max,
                                     struct BhSurface **out);

/**
 * Surface described by a JSON run configuration.
 *
 * # Safety
 * `config_json` must be null or a NUL-terminated string; `out` as above.
 */
enum BhStatus bh_surface_from_json(const char *config_json, struct BhSurface **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `surface` must be null or a handle from this library not yet freed.
 */
void bh_surface_free(struct BhSurface *surface);

/**
 * Writes `F(u,v)` as `(x1, y1, x2, y2)` to `out[0..4]`.
 *
 * # Safety
 * `surface` must be a live handle; `out` must hold 4 doubles.
 */
enum BhStatus bh_surface_position(const struct BhSurface *surface, double u, double v, double *out);

/**
 * Writes the unnormalized frame components `(N1, N2, N3)` to `out[0..3]`.
 *
 * # Safety
 * `surface` must be a live handle; `out` must hold 3 doubles.
 */
enum BhStatus bh_surface_normal(const struct BhSurface *surface, double u, double v, double *out);

/**
 * Writes the angle between the normal and the Hopf field to `out`.
 *
 * # Safety
 * `surface` must be a live handle; `out` must be writable.
 */
enum BhStatus bh_surface_angle(const struct BhSurface *surface, double u, double v, double *out);

/**
 * Runs the full verification with default settings. The JSON report is
 * stored in `*report_json` (free with `bh_string_free`). Returns
 * `VerificationFailed` when any check fails; the report is still produced.
 *
 * # Safety
 * `surface` must be a live handle; `report_json` must be writable.
 */
enum BhStatus bh_surface_verify(const struct BhSurface *surface, char **report_json);

/**
 * Releases a string returned by the library; null is ignored.
 *
 * # Safety
 * `s` must be null or a string from this library not yet freed.
 */
void bh_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BERGER_HELIX_H */
