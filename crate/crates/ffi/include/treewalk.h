#ifndef TREEWALK_H
#define TREEWALK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum TwStatus {
  TW_STATUS_OK = 0,
  TW_STATUS_NULL_POINTER = 1,
  TW_STATUS_INVALID_UTF8 = 2,
  TW_STATUS_PARSE = 3,
  TW_STATUS_MODEL = 4,
  TW_STATUS_ARGUMENT = 5,
  TW_STATUS_BUDGET = 6,
  TW_STATUS_NUMERIC = 7,
  TW_STATUS_INTERNAL = 8,
  TW_STATUS_IO = 9,
  TW_STATUS_PANIC = 10,
} TwStatus;

// Opaque model handle.
typedef struct TwModel TwModel;

// Structural summary of a model.
typedef struct TwModelInfo {
  // Period `d`.
  uint64_t period;
  // Range `k`.
  size_t range;
  // Number of coordinates of the fixed-point system.
  size_t coordinates;
  // Coordinates with bounded excursions.
  size_t bounded;
} TwModelInfo;

// A complex number `re + i·im`.
typedef struct TwComplex {
  double re;
  double im;
} TwComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or NULL. The pointer stays
// valid until the next failing call on the same thread.
const char *tw_last_error(void);

// Library version as a static NUL-terminated string.
const char *tw_version(void);

// Release a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must be NULL or a string returned through a `char **` out-parameter
// of this library that has not been freed.
void tw_string_free(char *s);

// Build a model from the text of a TOML configuration.
//
// # Safety
// `toml` must be a NUL-terminated string; `out` must be writable.
enum TwStatus tw_model_from_toml(const char *toml, struct TwModel **out);

// Build a model from a configuration file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum TwStatus tw_model_from_file(const char *path, struct TwModel **out);

// Build one of the bundled models (`srw_free`, `mu`, `green_poly`, …).
//
// # Safety
// `name` must be a NUL-terminated string; `out` must be writable.
enum TwStatus tw_model_from_stock(const char *name, struct TwModel **out);

// Release a model. NULL is ignored.
//
// # Safety
// `m` must be NULL or a handle that has not been freed.
void tw_model_free(struct TwModel *m);

// Period, range and coordinate counts.
//
// # Safety
// `m` must be a live handle; `out` must be writable.
enum TwStatus tw_model_info(const struct TwModel *m, struct TwModelInfo *out);

// Radius of convergence `R` of the Green function (the branch point).
//
// # Safety
// `m` must be a live handle; `radius` must be writable.
enum TwStatus tw_branch_point(const struct TwModel *m, double *radius);

// Exact `p^(n)(x, y)` as a `"num/den"` string (free with [`tw_string_free`]).
//
// # Safety
// `m` must be a live handle; `x`, `y` NUL-terminated; `out` writable.
enum TwStatus tw_oracle_pn(const struct TwModel *m,
                           const char *x,
                           const char *y,
                           size_t n,
                           char **out);

// `G_z(x, y)` and `F_z(x, y)` at `z = re + i·im`, `|z| ≤ R`.
//
// # Safety
// `m` must be a live handle; `x`, `y` NUL-terminated; `g`, `f` writable.
enum TwStatus tw_green(const struct TwModel *m,
                       const char *x,
                       const char *y,
                       double re,
                       double im,
                       struct TwComplex *g,
                       struct TwComplex *f);

// Constant `C` of `a_{dn+r} ~ C·R^{−dn}·n^{−3/2}` for `G(x, y)` (`full`) or
// `F(x, y)`, from the square-root transfer. No oracle fit is run.
//
// # Safety
// `m` must be a live handle; `x`, `y` NUL-terminated; `constant` writable.
enum TwStatus tw_transfer_constant(const struct TwModel *m,
                                   const char *x,
                                   const char *y,
                                   bool full,
                                   double *constant);

// Run the validation suite; `report` receives the CSV report and `passed`
// whether no check failed.
//
// # Safety
// `m` must be a live handle; `report` and `passed` writable.
enum TwStatus tw_validate(const struct TwModel *m, char **report, bool *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TREEWALK_H */
