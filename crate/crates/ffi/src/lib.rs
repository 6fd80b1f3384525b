//! C ABI for the quasiwave library.
//!
//! Every fallible function returns a [`QwStatus`] and writes its result
//! through an out-pointer. On failure the message is available from
//! [`qw_last_error_message`] on the same thread until the next failing call.
//! Objects are opaque handles released with the matching `*_free` function;
//! strings returned by the library are released with [`qw_string_free`].
//! Panics never cross the boundary: they are reported as `QW_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use quasiwave::diagnostics::{theta1_floor_for_mass, DiagnosticsRecord, RunClassification};
use quasiwave::harness::{load_scenario, run, write_report, RunReport, ScenarioConfig};
use quasiwave::initial_data::degeneracy_time_bound_from;
use quasiwave::wavespeed::WaveSpeedModel;
use quasiwave::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    Domain = 5,
    Degeneracy = 6,
    Numerical = 7,
    NotApplicable = 8,
    Io = 9,
    OutOfRange = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QwClassification {
    GlobalWindow = 0,
    Degenerate = 1,
    GradientBlowup = 2,
    Inconclusive = 3,
}

/// One diagnostics record of a run.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QwRecord {
    pub t: f64,
    pub min_u: f64,
    pub x_min_u: f64,
    pub min_c: f64,
    pub max_abs_r1: f64,
    pub max_abs_r2: f64,
    pub linf_ut_ux: f64,
    pub lp1: f64,
    pub lp2: f64,
    pub lp4: f64,
    pub momentum: f64,
    pub support_radius: f64,
}

impl From<&DiagnosticsRecord> for QwRecord {
    fn from(r: &DiagnosticsRecord) -> Self {
        Self {
            t: r.t,
            min_u: r.min_u,
            x_min_u: r.x_min_u,
            min_c: r.min_c,
            max_abs_r1: r.max_abs_r1,
            max_abs_r2: r.max_abs_r2,
            linf_ut_ux: r.linf_ut_ux,
            lp1: r.lp1,
            lp2: r.lp2,
            lp4: r.lp4,
            momentum: r.momentum,
            support_radius: r.support_radius,
        }
    }
}

/// Wave-speed model `c(theta)`.
pub struct QwModel(WaveSpeedModel);

/// Resolved scenario configuration.
pub struct QwConfig(ScenarioConfig);

/// Result of a run: classification, bounds, per-solver series.
pub struct QwReport(RunReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs were replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QwStatus {
    match e {
        Error::Syntax { .. } | Error::UnknownIdentifier { .. } | Error::Parse(_) => QwStatus::Parse,
        Error::Validation { .. } => QwStatus::Validation,
        Error::Domain(_) | Error::OutOfDomain { .. } => QwStatus::Domain,
        Error::Degeneracy { .. } => QwStatus::Degeneracy,
        Error::Eval(_) | Error::Quadrature { .. } | Error::Fit(_) => QwStatus::Numerical,
        Error::NotApplicable(_) => QwStatus::NotApplicable,
        Error::Io(_) => QwStatus::Io,
    }
}

struct Failure(QwStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(QwStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status plus message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> QwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QwStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            QwStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(QwStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .expect("interior NULs were replaced")
        .into_raw()
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failing call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qw_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn qw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Zabusky speed `c(theta) = (1 + theta)^(a/2)`, `a > 0`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn qw_model_zabusky(a: f64, out: *mut *mut QwModel) -> QwStatus {
    guard(|| {
        let m = WaveSpeedModel::zabusky(a)?;
        write_out(out, Box::into_raw(Box::new(QwModel(m))), "out")
    })
}

/// Constant speed `c0 > 0`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn qw_model_constant(c0: f64, out: *mut *mut QwModel) -> QwStatus {
    guard(|| {
        let m = WaveSpeedModel::constant(c0)?;
        write_out(out, Box::into_raw(Box::new(QwModel(m))), "out")
    })
}

/// Model from an expression in `theta`. Pass `-INFINITY` for `theta0` when
/// the speed never degenerates.
///
/// # Safety
/// `expr` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qw_model_expression(
    expr: *const c_char,
    theta0: f64,
    monotone: bool,
    out: *mut *mut QwModel,
) -> QwStatus {
    guard(|| {
        let text = str_arg(expr, "expr")?;
        let m = WaveSpeedModel::expression(text, theta0, monotone)?;
        write_out(out, Box::into_raw(Box::new(QwModel(m))), "out")
    })
}

/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qw_model_eval(model: *const QwModel, theta: f64, out: *mut f64) -> QwStatus {
    guard(|| {
        let m = handle(model, "model")?;
        write_out(out, m.0.eval(theta)?, "out")
    })
}

/// `int_lo^hi c(s) ds`.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qw_model_primitive(model: *const QwModel, lo: f64, hi: f64, out: *mut f64) -> QwStatus {
    guard(|| {
        let m = handle(model, "model")?;
        write_out(out, m.0.primitive(lo, hi)?, "out")
    })
}

/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qw_model_theta0(model: *const QwModel, out: *mut f64) -> QwStatus {
    guard(|| {
        let m = handle(model, "model")?;
        write_out(out, m.0.theta0(), "out")
    })
}

/// Lower bound on `u` for incoming data with `-int u1 = mass`.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qw_theta1_floor(model: *const QwModel, mass: f64, out: *mut f64) -> QwStatus {
    guard(|| {
        let m = handle(model, "model")?;
        write_out(out, theta1_floor_for_mass(&m.0, mass)?, "out")
    })
}

/// Upper bound on the degeneracy time, with `f0 = -int u0` and
/// `f1 = -int u1`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qw_degeneracy_time_bound(
    theta0: f64,
    c0: f64,
    k: f64,
    f0: f64,
    f1: f64,
    out: *mut f64,
) -> QwStatus {
    guard(|| write_out(out, degeneracy_time_bound_from(theta0, c0, k, f0, f1)?, "out"))
}

/// # Safety
/// `model` must come from this library and not have been freed. NULL is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn qw_model_free(model: *mut QwModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Parses and resolves a scenario from TOML text.
///
/// # Safety
/// `toml` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qw_config_from_toml(toml: *const c_char, out: *mut *mut QwConfig) -> QwStatus {
    guard(|| {
        let cfg = ScenarioConfig::from_toml_str(str_arg(toml, "toml")?)?;
        write_out(out, Box::into_raw(Box::new(QwConfig(cfg))), "out")
    })
}

/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qw_config_load(path: *const c_char, out: *mut *mut QwConfig) -> QwStatus {
    guard(|| {
        let cfg = load_scenario(Path::new(str_arg(path, "path")?))?;
        write_out(out, Box::into_raw(Box::new(QwConfig(cfg))), "out")
    })
}

/// Resolved configuration as TOML, including defaults and the sized grid.
/// Free the string with [`qw_string_free`].
///
/// # Safety
/// `config` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qw_config_to_toml(config: *const QwConfig, out: *mut *mut c_char) -> QwStatus {
    guard(|| {
        let c = handle(config, "config")?;
        write_out(out, into_c_string(c.0.to_toml_string()), "out")
    })
}

/// Hex SHA-256 of the resolved configuration. Free with [`qw_string_free`].
///
/// # Safety
/// `config` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qw_config_hash(config: *const QwConfig, out: *mut *mut c_char) -> QwStatus {
    guard(|| {
        let c = handle(config, "config")?;
        write_out(out, into_c_string(c.0.hash()), "out")
    })
}

/// # Safety
/// `config` must come from this library and not have been freed. NULL is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn qw_config_free(config: *mut QwConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Runs the configured solver(s). Blocks until the run ends.
///
/// # Safety
/// `config` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qw_run(config: *const QwConfig, out: *mut *mut QwReport) -> QwStatus {
    guard(|| {
        let c = handle(config, "config")?;
        let report = run(&c.0)?;
        write_out(out, Box::into_raw(Box::new(QwReport(report))), "out")
    })
}

/// Combined classification. `t_stop` receives the stop time, the horizon for
/// a global window, or NaN when inconclusive; it may be NULL.
///
/// # Safety
/// `report` must be a live handle; `kind` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qw_report_classification(
    report: *const QwReport,
    kind: *mut QwClassification,
    t_stop: *mut f64,
) -> QwStatus {
    guard(|| {
        let r = handle(report, "report")?;
        let (k, t) = match &r.0.classification {
            RunClassification::GlobalWindow { t_end } => (QwClassification::GlobalWindow, *t_end),
            RunClassification::Degenerate { t_stop, .. } => (QwClassification::Degenerate, *t_stop),
            RunClassification::GradientBlowup { t_stop, .. } => (QwClassification::GradientBlowup, *t_stop),
            RunClassification::Inconclusive { .. } => (QwClassification::Inconclusive, f64::NAN),
        };
        write_out(kind, k, "kind")?;
        if !t_stop.is_null() {
            t_stop.write(t);
        }
        Ok(())
    })
}

/// Riccati blow-up time estimate of the primary solver.
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qw_report_t_estimate(report: *const QwReport, out: *mut f64) -> QwStatus {
    guard(|| {
        let r = handle(report, "report")?;
        let fit = r
            .0
            .riccati()
            .ok_or_else(|| Failure(QwStatus::NotApplicable, "run did not end in gradient blow-up".into()))?;
        write_out(out, fit.t_estimate, "out")
    })
}

/// Number of solver runs in the report (1, or 2 with `solver = "both"`).
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qw_report_solver_count(report: *const QwReport, out: *mut usize) -> QwStatus {
    guard(|| {
        let r = handle(report, "report")?;
        write_out(out, r.0.outcomes.len(), "out")
    })
}

/// Number of diagnostics records of solver run `solver` (0 is the primary).
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qw_report_record_count(report: *const QwReport, solver: usize, out: *mut usize) -> QwStatus {
    guard(|| {
        let r = handle(report, "report")?;
        let o = r
            .0
            .outcomes
            .get(solver)
            .ok_or_else(|| Failure(QwStatus::OutOfRange, format!("solver index {solver}")))?;
        write_out(out, o.series.len(), "out")
    })
}

/// Record `index` of solver run `solver`.
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qw_report_record(
    report: *const QwReport,
    solver: usize,
    index: usize,
    out: *mut QwRecord,
) -> QwStatus {
    guard(|| {
        let r = handle(report, "report")?;
        let rec = r
            .0
            .outcomes
            .get(solver)
            .and_then(|o| o.series.get(index))
            .ok_or_else(|| Failure(QwStatus::OutOfRange, format!("record {index} of solver {solver}")))?;
        write_out(out, QwRecord::from(rec), "out")
    })
}

/// Full report as JSON. Free with [`qw_string_free`].
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qw_report_to_json(report: *const QwReport, out: *mut *mut c_char) -> QwStatus {
    guard(|| {
        let r = handle(report, "report")?;
        let json = serde_json::to_string(&r.0).map_err(|e| Failure(QwStatus::Io, e.to_string()))?;
        write_out(out, into_c_string(json), "out")
    })
}

/// Writes `report.json` and one CSV series per solver into `dir`.
///
/// # Safety
/// `report` must be a live handle; `dir` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn qw_report_write(report: *const QwReport, dir: *const c_char) -> QwStatus {
    guard(|| {
        let r = handle(report, "report")?;
        write_report(&r.0, Path::new(str_arg(dir, "dir")?))?;
        Ok(())
    })
}

/// # Safety
/// `report` must come from this library and not have been freed. NULL is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn qw_report_free(report: *mut QwReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
