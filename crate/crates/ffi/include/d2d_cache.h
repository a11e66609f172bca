#ifndef D2D_CACHE_H
#define D2D_CACHE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum D2dStatus {
  D2D_STATUS_OK = 0,
  D2D_STATUS_NULL_POINTER = 1,
  // Bad configuration or argument.
  D2D_STATUS_INVALID_ARGUMENT = 2,
  // Numerical failure.
  D2D_STATUS_NUMERIC = 3,
  // I/O or serialisation failure.
  D2D_STATUS_IO = 4,
  // A Rust panic was caught at the boundary.
  D2D_STATUS_PANIC = 5,
} D2dStatus;

// Opaque experiment handle: a preset plus any overrides applied to it.
typedef struct D2dScenario D2dScenario;

// Estimate with standard error; `sample_count` is 0 for exact values.
typedef struct D2dEstimate {
  double value;
  double standard_error;
  uint64_t sample_count;
} D2dEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Crate version as a static NUL-terminated string.
const char *d2d_version(void);

// Message for the last failed call on this thread; empty if none.
// The pointer stays valid until the next failing call on the same thread.
const char *d2d_last_error_message(void);

// Creates a handle from a built-in preset name such as `"validate_audio"`.
//
// # Safety
// `name` must be a NUL-terminated string; `out` must be writable.
enum D2dStatus d2d_scenario_from_preset(const char *name, struct D2dScenario **out);

// Creates a handle from TOML experiment text, in the CLI config format.
//
// # Safety
// `toml` must be a NUL-terminated string; `out` must be writable.
enum D2dStatus d2d_scenario_from_config(const char *toml, struct D2dScenario **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `h` must come from this library and not be used afterwards.
void d2d_scenario_free(struct D2dScenario *h);

// Sets the mean transmitter lifespan in seconds, keeping the law family.
//
// # Safety
// `h` must be a live handle.
enum D2dStatus d2d_scenario_set_mean_lifespan(struct D2dScenario *h, double seconds);

// Sets the transmitter density in nodes per square metre.
//
// # Safety
// `h` must be a live handle.
enum D2dStatus d2d_scenario_set_density(struct D2dScenario *h, double density);

// Number of objects in the catalogue.
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum D2dStatus d2d_scenario_catalogue_size(const struct D2dScenario *h, size_t *out);

// Closed-form total success probability of the base scenario.
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum D2dStatus d2d_total_success(const struct D2dScenario *h, double *out);

// Closed-form success probability of one object (0-based index).
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum D2dStatus d2d_per_object_success(const struct D2dScenario *h, size_t object, double *out);

// Monte Carlo estimate of the total success probability.
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum D2dStatus d2d_simulate_total(const struct D2dScenario *h,
                                  uint64_t iterations,
                                  uint64_t seed,
                                  struct D2dEstimate *out);

// Monte Carlo estimate for one object (0-based index), always requesting it.
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum D2dStatus d2d_simulate_per_object(const struct D2dScenario *h,
                                       size_t object,
                                       uint64_t iterations,
                                       uint64_t seed,
                                       struct D2dEstimate *out);

// Runs every sweep and variant of the handle's experiment and returns the
// result table as CSV. Free the string with `d2d_string_free`.
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum D2dStatus d2d_run_csv(const struct D2dScenario *h, char **out);

// Frees a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void d2d_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* D2D_CACHE_H */
