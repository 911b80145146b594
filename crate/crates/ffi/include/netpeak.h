#ifndef NETPEAK_H
#define NETPEAK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NetpeakStatus {
  NETPEAK_STATUS_OK = 0,
  NETPEAK_STATUS_NULL_POINTER = 1,
  NETPEAK_STATUS_INVALID_UTF8 = 2,
  // The configuration document does not parse or fails validation.
  NETPEAK_STATUS_CONFIG_ERROR = 3,
  NETPEAK_STATUS_UNKNOWN_SCENARIO = 4,
  // A parameter is outside its domain.
  NETPEAK_STATUS_INVALID_PARAMETER = 5,
  // No GPON split can carry the demand.
  NETPEAK_STATUS_INFEASIBLE = 6,
  NETPEAK_STATUS_PANIC = 7,
} NetpeakStatus;

// Opaque model handle.
typedef struct NetpeakModel NetpeakModel;

// Annual energy per segment for one scenario.
typedef struct NetpeakTotals {
  double onu_gwh;
  double access_gwh;
  double national_gwh;
  double longhaul_gwh;
  double cdn_gwh;
  double home_cache_gwh;
  double olt_cache_gwh;
  double dynamic_gwh;
  double total_gwh;
  // Against the configured baseline scenario.
  double delta_gwh;
  double volume_eb;
  double efficiency_wh_per_gb;
  uint32_t subscribers_per_gpon;
} NetpeakTotals;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Create a model with the built-in parameters and presets.
//
// # Safety
// `out` must be valid for writes.
enum NetpeakStatus netpeak_model_new_default(struct NetpeakModel **out);

// Create a model from a TOML document merged onto the defaults.
//
// # Safety
// `toml` must be a nul-terminated string; `out` must be valid for writes.
enum NetpeakStatus netpeak_model_from_toml(const char *toml, struct NetpeakModel **out);

// Release a model. Null is ignored.
//
// # Safety
// `model` must be null or a handle from this library not yet freed.
void netpeak_model_free(struct NetpeakModel *model);

// Number of scenario presets held by the model.
//
// # Safety
// `model` must be a live handle; `out` must be valid for writes.
enum NetpeakStatus netpeak_model_scenario_count(const struct NetpeakModel *model, size_t *out);

// Evaluate a named preset.
//
// # Safety
// `model` must be a live handle, `scenario` a nul-terminated string and
// `out` valid for writes.
enum NetpeakStatus netpeak_evaluate(const struct NetpeakModel *model,
                                    const char *scenario,
                                    struct NetpeakTotals *out);

// Evaluate a named preset into the full JSON report. Free the string with
// [`netpeak_string_free`].
//
// # Safety
// `model` must be a live handle, `scenario` a nul-terminated string and
// `out` valid for writes.
enum NetpeakStatus netpeak_evaluate_json(const struct NetpeakModel *model,
                                         const char *scenario,
                                         char **out);

// Release a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a string from this library not yet freed.
void netpeak_string_free(char *s);

// Message of the last failed call on this thread, or an empty string. The
// pointer stays valid until the next call into the library on this thread.
const char *netpeak_last_error_message(void);

// Smallest `q` with `P(X > q) < eps` for `X ~ Binomial(n, p)`.
//
// # Safety
// `out` must be valid for writes.
enum NetpeakStatus netpeak_binomial_quantile(uint64_t n, double p, double eps, uint64_t *out);

// Library version as a static string.
const char *netpeak_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NETPEAK_H */
