#ifndef QUASIWAVE_H
#define QUASIWAVE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum QwClassification {
  QW_CLASSIFICATION_GLOBAL_WINDOW = 0,
  QW_CLASSIFICATION_DEGENERATE = 1,
  QW_CLASSIFICATION_GRADIENT_BLOWUP = 2,
  QW_CLASSIFICATION_INCONCLUSIVE = 3,
} QwClassification;

// Result code of every fallible call.
typedef enum QwStatus {
  QW_STATUS_OK = 0,
  QW_STATUS_NULL_POINTER = 1,
  QW_STATUS_INVALID_UTF8 = 2,
  QW_STATUS_PARSE = 3,
  QW_STATUS_VALIDATION = 4,
  QW_STATUS_DOMAIN = 5,
  QW_STATUS_DEGENERACY = 6,
  QW_STATUS_NUMERICAL = 7,
  QW_STATUS_NOT_APPLICABLE = 8,
  QW_STATUS_IO = 9,
  QW_STATUS_OUT_OF_RANGE = 10,
  QW_STATUS_PANIC = 11,
} QwStatus;

// Resolved scenario configuration.
typedef struct QwConfig QwConfig;

// Wave-speed model `c(theta)`.
typedef struct QwModel QwModel;

// Result of a run: classification, bounds, per-solver series.
typedef struct QwReport QwReport;

// One diagnostics record of a run.
typedef struct QwRecord {
  double t;
  double min_u;
  double x_min_u;
  double min_c;
  double max_abs_r1;
  double max_abs_r2;
  double linf_ut_ux;
  double lp1;
  double lp2;
  double lp4;
  double momentum;
  double support_radius;
} QwRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *qw_version(void);

// Message of the last failing call on this thread, or NULL. The pointer
// stays valid until the next failing call on the same thread.
const char *qw_last_error_message(void);

// Releases a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not have been freed already.
void qw_string_free(char *s);

// Zabusky speed `c(theta) = (1 + theta)^(a/2)`, `a > 0`.
//
// # Safety
// `out` must be a valid pointer to writable storage.
enum QwStatus qw_model_zabusky(double a, struct QwModel **out);

// Constant speed `c0 > 0`.
//
// # Safety
// `out` must be a valid pointer to writable storage.
enum QwStatus qw_model_constant(double c0, struct QwModel **out);

// Model from an expression in `theta`. Pass `-INFINITY` for `theta0` when
// the speed never degenerates.
//
// # Safety
// `expr` must be a NUL-terminated string; `out` must be writable.
enum QwStatus qw_model_expression(const char *expr,
                                  double theta0,
                                  bool monotone,
                                  struct QwModel **out);

// # Safety
// `model` must be a live handle; `out` must be writable.
enum QwStatus qw_model_eval(const struct QwModel *model, double theta, double *out);

// `int_lo^hi c(s) ds`.
//
// # Safety
// `model` must be a live handle; `out` must be writable.
enum QwStatus qw_model_primitive(const struct QwModel *model, double lo, double hi, double *out);

// # Safety
// `model` must be a live handle; `out` must be writable.
enum QwStatus qw_model_theta0(const struct QwModel *model, double *out);

// Lower bound on `u` for incoming data with `-int u1 = mass`.
//
// # Safety
// `model` must be a live handle; `out` must be writable.
enum QwStatus qw_theta1_floor(const struct QwModel *model, double mass, double *out);

// Upper bound on the degeneracy time, with `f0 = -int u0` and
// `f1 = -int u1`.
//
// # Safety
// `out` must be writable.
enum QwStatus qw_degeneracy_time_bound(double theta0,
                                       double c0,
                                       double k,
                                       double f0,
                                       double f1,
                                       double *out);

// # Safety
// `model` must come from this library and not have been freed. NULL is
// ignored.
void qw_model_free(struct QwModel *model);

// Parses and resolves a scenario from TOML text.
//
// # Safety
// `toml` must be a NUL-terminated string; `out` must be writable.
enum QwStatus qw_config_from_toml(const char *toml, struct QwConfig **out);

// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum QwStatus qw_config_load(const char *path, struct QwConfig **out);

// Resolved configuration as TOML, including defaults and the sized grid.
// Free the string with [`qw_string_free`].
//
// # Safety
// `config` must be a live handle; `out` must be writable.
enum QwStatus qw_config_to_toml(const struct QwConfig *config, char **out);

// Hex SHA-256 of the resolved configuration. Free with [`qw_string_free`].
//
// # Safety
// `config` must be a live handle; `out` must be writable.
enum QwStatus qw_config_hash(const struct QwConfig *config, char **out);

// # Safety
// `config` must come from this library and not have been freed. NULL is
// ignored.
void qw_config_free(struct QwConfig *config);

// Runs the configured solver(s). Blocks until the run ends.
//
// # Safety
// `config` must be a live handle; `out` must be writable.
enum QwStatus qw_run(const struct QwConfig *config, struct QwReport **out);

// Combined classification. `t_stop` receives the stop time, the horizon for
// a global window, or NaN when inconclusive; it may be NULL.
//
// # Safety
// `report` must be a live handle; `kind` must be writable.
enum QwStatus qw_report_classification(const struct QwReport *report,
                                       enum QwClassification *kind,
                                       double *t_stop);

// Riccati blow-up time estimate of the primary solver.
//
// # Safety
// `report` must be a live handle; `out` must be writable.
enum QwStatus qw_report_t_estimate(const struct QwReport *report, double *out);

// Number of solver runs in the report (1, or 2 with `solver = "both"`).
//
// # Safety
// `report` must be a live handle; `out` must be writable.
enum QwStatus qw_report_solver_count(const struct QwReport *report, uintptr_t *out);

// Number of diagnostics records of solver run `solver` (0 is the primary).
//
// # Safety
// `report` must be a live handle; `out` must be writable.
enum QwStatus qw_report_record_count(const struct QwReport *report,
                                     uintptr_t solver,
                                     uintptr_t *out);

// Record `index` of solver run `solver`.
//
// # Safety
// `report` must be a live handle; `out` must be writable.
enum QwStatus qw_report_record(const struct QwReport *report,
                               uintptr_t solver,
                               uintptr_t index,
                               struct QwRecord *out);

// Full report as JSON. Free with [`qw_string_free`].
//
// # Safety
// `report` must be a live handle; `out` must be writable.
enum QwStatus qw_report_to_json(const struct QwReport *report, char **out);

// Writes `report.json` and one CSV series per solver into `dir`.
//
// # Safety
// `report` must be a live handle; `dir` must be a NUL-terminated string.
enum QwStatus qw_report_write(const struct QwReport *report, const char *dir);

// # Safety
// `report` must come from this library and not have been freed. NULL is
// ignored.
void qw_report_free(struct QwReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QUASIWAVE_H */
