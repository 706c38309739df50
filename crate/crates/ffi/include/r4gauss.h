#ifndef R4GAUSS_H
#define R4GAUSS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Status codes returned by every fallible function.
typedef enum R4Status {
  // Success.
  R4_OK = 0,
  // A required pointer argument was null.
  R4_NULL_POINTER = 1,
  // A string argument was not valid UTF-8.
  R4_INVALID_UTF8 = 2,
  // The surface description could not be parsed or built.
  R4_PARSE = 3,
  // A point or chart lies outside the surface, or the evaluation failed.
  R4_DOMAIN = 4,
  // The operation needs a closed surface.
  R4_NOT_CLOSED = 5,
  // An argument is out of range.
  R4_INVALID_ARGUMENT = 6,
  // A quadrature did not converge.
  R4_NON_CONVERGENT = 7,
  // The engine panicked; this is a bug.
  R4_INTERNAL = 8,
} R4Status;

// A parsed surface with its atlas.
typedef struct R4Surface R4Surface;

// Curvature invariants and Gauss map Jacobians at a point.
typedef struct R4Invariants {
  // Gaussian curvature `K`.
  double k;
  // Normal curvature `K^N`.
  double kn;
  // Discriminant `Δ` of the curvature ellipse.
  double delta;
  // Squared mean curvature `|H|²`.
  double h2;
  // Jacobian of `g₁`, equal to `(K + K^N)/2`.
  double j1;
  // Jacobian of `g₂`, equal to `(K - K^N)/2`.
  double j2;
  // Jacobian of `g₁` from the pulled-back area form.
  double j1_pullback;
  // Jacobian of `g₂` from the pulled-back area form.
  double j2_pullback;
} R4Invariants;

// Summary of the singular set of one Gauss map component.
typedef struct R4SingularSummary {
  size_t curves;
  size_t cusps_positive;
  size_t cusps_negative;
  // Cusp candidates that could not be classified.
  size_t unresolved;
  bool g1_pass;
  bool g2_pass;
  bool g3_pass;
} R4SingularSummary;

// Global quantities and identity verdict of a closed surface.
typedef struct R4GaussBonnet {
  // Euler characteristic of the surface.
  int64_t chi;
  double area;
  // `∫K dA`.
  double total_k;
  // `∫K^N dA`.
  double total_kn;
  // Degrees of `g₁` and `g₂` as quadrature values.
  double degree[2];
  // `χ(Mᵢ⁺)` for `i = 1, 2`.
  int64_t chi_plus[2];
  // `χ(Mᵢ⁻)` for `i = 1, 2`.
  int64_t chi_minus[2];
  // Positive cusp counts for `i = 1, 2`.
  size_t cusps_positive[2];
  // Negative cusp counts for `i = 1, 2`.
  size_t cusps_negative[2];
  // Both components satisfy (G₁) and (G₂).
  bool generic;
  // Every asserted identity holds.
  bool pass;
} R4GaussBonnet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses a surface description in TOML and stores a new handle in `*out`.
//
// # Safety
// `toml` must be a nul-terminated string and `out` a valid pointer.
enum R4Status r4_surface_from_toml(const char *toml, struct R4Surface **out);

// Loads a built-in surface by name, such as `sphere` or `example2`.
//
// # Safety
// `name` must be a nul-terminated string and `out` a valid pointer.
enum R4Status r4_surface_builtin(const char *name, struct R4Surface **out);

// Releases a handle; null is ignored.
//
// # Safety
// `surface` must be null or a handle not yet released.
void r4_surface_free(struct R4Surface *surface);

// Overrides a declared parameter and rebuilds the atlas. The handle is
// unchanged on failure.
//
// # Safety
// `surface` must be a valid handle and `name` a nul-terminated string.
enum R4Status r4_surface_set_param(struct R4Surface *surface, const char *name, double value);

// Number of charts of the surface, or 0 for a null handle.
//
// # Safety
// `surface` must be null or a valid handle.
size_t r4_surface_chart_count(const struct R4Surface *surface);

// Curvature invariants at `(u, v)` in chart `chart` (0-based).
//
// # Safety
// `surface` must be a valid handle and `out` a valid pointer.
enum R4Status r4_invariants_at(const struct R4Surface *surface,
                               size_t chart,
                               double u,
                               double v,
                               struct R4Invariants *out);

// Traces and classifies the singular set of component `component` (1 or
// 2) at grid resolution `grid`; 0 selects the surface's default grid.
//
// # Safety
// `surface` must be a valid handle and `out` a valid pointer.
enum R4Status r4_singular_summary(const struct R4Surface *surface,
                                  uint32_t component,
                                  size_t grid,
                                  struct R4SingularSummary *out);

// Computes the global quantities of a closed surface and checks the
// Gauss–Bonnet type identities; `grid` 0 selects the default grid.
//
// # Safety
// `surface` must be a valid handle and `out` a valid pointer.
enum R4Status r4_gauss_bonnet(const struct R4Surface *surface,
                              size_t grid,
                              struct R4GaussBonnet *out);

// Message of the last failing call on this thread, or null if none failed.
// The pointer stays valid until the next failing call on this thread.
const char *r4_last_error(void);

// Library version as a static nul-terminated string.
const char *r4_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* R4GAUSS_H */
