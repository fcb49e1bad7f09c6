/* divhull C ABI: division hulls on elliptic surfaces over Q(t). */

#ifndef DIVHULL_H
#define DIVHULL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes mirroring the CLI exit contract.
typedef enum DivhullStatus {
  DIVHULL_STATUS_OK = 0,
  DIVHULL_STATUS_INPUT_ERROR = 1,
  DIVHULL_STATUS_MATH_ERROR = 2,
  DIVHULL_STATUS_BUDGET_ERROR = 3,
  DIVHULL_STATUS_NULL_POINTER = 4,
} DivhullStatus;

// Opaque surface handle: a loaded fixture (model, sections, optional t0).
typedef struct DivhullSurface DivhullSurface;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Last error message for this thread, or null if none; free with
// `divhull_string_free`.
char *divhull_last_error_message(void);

// Release a string returned by any divhull entry point.
//
// # Safety
// `s` must have been returned by this library and not freed before.
void divhull_string_free(char *s);

// Load a surface fixture from JSON:
// {"A": "...", "B": "...", "sections": [{"x","y"}], "t0": "..."}.
//
// # Safety
// `json` must be a valid NUL-terminated string; `out` a valid pointer.
enum DivhullStatus divhull_surface_load_json(const char *json, struct DivhullSurface **out);

// Release a surface handle.
//
// # Safety
// `surface` must come from `divhull_surface_load_json` and not be reused.
void divhull_surface_free(struct DivhullSurface *surface);

// Full surface analysis as JSON: j, discriminant, poles, special primes,
// geometric pole count, and per-place reduction types.
//
// # Safety
// `surface` from `divhull_surface_load_json`; `out_json` valid.
enum DivhullStatus divhull_surface_analyze(const struct DivhullSurface *surface, char **out_json);

// Per-fiber hull bound decision as JSON
// ({"verdict":"Bound","value":9} or {"verdict":"NotApplicable"}).
//
// # Safety
// As for `divhull_surface_analyze`.
enum DivhullStatus divhull_decide_bound(const struct DivhullSurface *surface,
                                        uint64_t ell,
                                        bool p_is_ell_multiple,
                                        int64_t base_genus,
                                        char **out_json);

// Ramification-tree level summary as JSON; `budget` 0 means the default.
//
// # Safety
// `out_json` must be a valid pointer.
enum DivhullStatus divhull_ramtree_summary(uint64_t ell,
                                           uint32_t m,
                                           uint32_t depth,
                                           uint64_t budget,
                                           char **out_json);

// Cross-check the rule-based tree against the enumeration oracle; writes 1
// into `out_match` when the weighted typed trees are isomorphic.
//
// # Safety
// `out_match` must be a valid pointer.
enum DivhullStatus divhull_ramtree_oracle_check(uint64_t ell,
                                                uint32_t m,
                                                uint32_t depth,
                                                uint64_t budget,
                                                int32_t *out_match);

// The four genus lower bounds as JSON.
//
// # Safety
// `out_json` must be a valid pointer.
enum DivhullStatus divhull_genus_bounds(uint64_t ell,
                                        uint64_t n_poles,
                                        int64_t base_genus,
                                        char **out_json);

// Tower constants for linear-bound constants c1, c2 (exact rationals as
// strings), with N(B) and the shallow-level count bound for `ell`.
//
// # Safety
// `c1`, `c2` valid strings; `out_json` valid.
enum DivhullStatus divhull_tower_params(const char *c1,
                                        const char *c2,
                                        uint64_t b_height,
                                        uint64_t ell,
                                        char **out_json);

// Fiber scan as a single JSON report. `bound` is the hull bound to flag
// against; pass `has_bound = false` to scan without a claim.
//
// # Safety
// As for `divhull_surface_analyze`.
enum DivhullStatus divhull_fiber_scan(const struct DivhullSurface *surface,
                                      uintptr_t section_index,
                                      uint64_t ell,
                                      uint64_t height_max,
                                      uint32_t n_max,
                                      bool has_bound,
                                      uint64_t bound,
                                      char **out_json);

// Torsion scan as a single JSON report.
//
// # Safety
// As for `divhull_surface_analyze`.
enum DivhullStatus divhull_torsion_scan(const struct DivhullSurface *surface,
                                        uint64_t height_max,
                                        char **out_json);

// Prime-density scan at the fiber `t0` (a rational string, or null to use
// the fixture's own t0), as a single JSON report.
//
// # Safety
// As for `divhull_surface_analyze`; `t0` may be null.
enum DivhullStatus divhull_prime_scan(const struct DivhullSurface *surface,
                                      uintptr_t section_index,
                                      const char *t0,
                                      uint64_t ell,
                                      uint64_t threshold_m,
                                      uint64_t p_max,
                                      char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DIVHULL_H */
