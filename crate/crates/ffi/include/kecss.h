/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef KECSS_H
#define KECSS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum KecssStatus {
  KECSS_STATUS_OK = 0,
  // A required pointer argument was null.
  KECSS_STATUS_NULL_ARGUMENT = 1,
  // Malformed instance text, rational or UTF-8.
  KECSS_STATUS_PARSE = 2,
  // The instance has no feasible solution (or no LP solution).
  KECSS_STATUS_INFEASIBLE = 3,
  // A solver invariant failed; this is a bug report, not bad input.
  KECSS_STATUS_INVARIANT = 4,
  // Well-formed but invalid input, such as k < 1 or a vertex out of range.
  KECSS_STATUS_INVALID_ARGUMENT = 5,
  // Output buffer too small.
  KECSS_STATUS_BUFFER_TOO_SMALL = 6,
  // Any other failure, including a caught panic.
  KECSS_STATUS_INTERNAL = 7,
} KecssStatus;

typedef enum KecssMode {
  KECSS_MODE_ECSS = 0,
  KECSS_MODE_ECSM = 1,
  KECSS_MODE_SUBSET = 2,
} KecssMode;

// Opaque problem instance.
typedef struct KecssInstance KecssInstance;

// Opaque solver result.
typedef struct KecssSolution KecssSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null after a
// success. Valid until the next call on the same thread.
const char *kecss_last_error(void);

// Library version, a static string.
const char *kecss_version(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void kecss_string_free(char *s);

// Parses instance text (the `kecss` instance file format).
//
// # Safety
// `text` must be a nul-terminated string; `out` must be writable.
enum KecssStatus kecss_instance_parse(const char *text, struct KecssInstance **out);

// Creates an instance on `n` vertices with no edges, rooted at vertex 0.
//
// # Safety
// `out` must be writable.
enum KecssStatus kecss_instance_new(enum KecssMode mode,
                                    size_t n,
                                    int64_t k,
                                    struct KecssInstance **out);

// Appends an edge `u v` with cost given as rational text (`"3"`, `"3/2"`,
// `"0.25"`). Edge ids follow insertion order.
//
// # Safety
// `instance` must be a live handle; `cost` a nul-terminated string.
enum KecssStatus kecss_instance_add_edge(struct KecssInstance *instance,
                                         size_t u,
                                         size_t v,
                                         const char *cost);

// Replaces the terminal set of a subset instance.
//
// # Safety
// `instance` must be a live handle; `terminals` must point to `len` values.
enum KecssStatus kecss_instance_set_terminals(struct KecssInstance *instance,
                                              const size_t *terminals,
                                              size_t len);

// Number of vertices, or 0 for a null handle.
//
// # Safety
// `instance` must be null or a live handle.
size_t kecss_instance_vertex_count(const struct KecssInstance *instance);

// Number of edges, or 0 for a null handle.
//
// # Safety
// `instance` must be null or a live handle.
size_t kecss_instance_edge_count(const struct KecssInstance *instance);

// Instance in file format; free with [`kecss_string_free`].
//
// # Safety
// `instance` must be a live handle; `out` must be writable.
enum KecssStatus kecss_instance_to_text(const struct KecssInstance *instance, char **out);

// # Safety
// `instance` must be null or a live handle; it is invalid afterwards.
void kecss_instance_free(struct KecssInstance *instance);

// Exact LP optimum at connectivity `k` for the instance's mode, as text.
//
// # Safety
// `instance` must be a live handle; `out` must be writable.
enum KecssStatus kecss_lp_value(const struct KecssInstance *instance, int64_t k, char **out);

// Runs the solver for the instance's mode and k.
//
// # Safety
// `instance` must be a live handle; `out` must be writable.
enum KecssStatus kecss_solve(const struct KecssInstance *instance, struct KecssSolution **out);

// Number of entries in the multiplicity vector, or 0 for a null handle.
//
// # Safety
// `solution` must be null or a live handle.
size_t kecss_solution_len(const struct KecssSolution *solution);

// Copies the multiplicity of every edge into `buffer`, which must hold
// [`kecss_solution_len`] entries.
//
// # Safety
// `solution` must be a live handle; `buffer` must hold `capacity` values.
enum KecssStatus kecss_solution_multiplicities(const struct KecssSolution *solution,
                                               uint64_t *buffer,
                                               size_t capacity);

// Solution cost as rational text.
//
// # Safety
// `solution` must be a live handle; `out` must be writable.
enum KecssStatus kecss_solution_cost(const struct KecssSolution *solution, char **out);

// Full solve report as JSON (the CLI's solution format).
//
// # Safety
// `solution` must be a live handle; `out` must be writable.
enum KecssStatus kecss_solution_report_json(const struct KecssSolution *solution, char **out);

// # Safety
// `solution` must be null or a live handle; it is invalid afterwards.
void kecss_solution_free(struct KecssSolution *solution);

// Checks that multiplicities `z` (one per edge) satisfy the instance's
// connectivity requirement. Enumerates every cut when `exhaustive` and the
// graph has at most 16 vertices; uses minimum cuts otherwise.
//
// # Safety
// `instance` must be a live handle, `z` must point to `len` values and
// `passed` must be writable.
enum KecssStatus kecss_verify(const struct KecssInstance *instance,
                              const uint64_t *z,
                              size_t len,
                              bool exhaustive,
                              bool *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KECSS_H */
