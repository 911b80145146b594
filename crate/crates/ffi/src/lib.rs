//! C ABI over the netpeak model.
//!
//! A [`NetpeakModel`] is an opaque handle owning a resolved run configuration
//! (model parameters plus scenario presets). Every entry point returns a
//! [`NetpeakStatus`]; on failure a human readable message is kept per thread
//! and can be read with [`netpeak_last_error_message`]. Panics never cross the
//! boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use netpeak::config::{ConfigError, RunConfig};
use netpeak::peakstats::{binomial_quantile, ConfidenceLevel};
use netpeak::{EnergyReport, ModelError};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetpeakStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// The configuration document does not parse or fails validation.
    ConfigError = 3,
    UnknownScenario = 4,
    /// A parameter is outside its domain.
    InvalidParameter = 5,
    /// No GPON split can carry the demand.
    Infeasible = 6,
    Panic = 7,
}

/// Annual energy per segment for one scenario.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NetpeakTotals {
    pub onu_gwh: f64,
    pub access_gwh: f64,
    pub national_gwh: f64,
    pub longhaul_gwh: f64,
    pub cdn_gwh: f64,
    pub home_cache_gwh: f64,
    pub olt_cache_gwh: f64,
    pub dynamic_gwh: f64,
    pub total_gwh: f64,
    /// Against the configured baseline scenario.
    pub delta_gwh: f64,
    pub volume_eb: f64,
    pub efficiency_wh_per_gb: f64,
    pub subscribers_per_gpon: u32,
}

/// Opaque model handle.
pub struct NetpeakModel {
    config: RunConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let mut bytes = message.into().into_bytes();
    bytes.retain(|b| *b != 0);
    let message = CString::new(bytes).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = message);
}

struct Failure(NetpeakStatus, String);

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        let status = match e {
            ConfigError::UnknownScenario { .. } => NetpeakStatus::UnknownScenario,
            _ => NetpeakStatus::ConfigError,
        };
        Failure(status, e.to_string())
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        let status = match e {
            ModelError::Access(_) => NetpeakStatus::Infeasible,
            _ => NetpeakStatus::InvalidParameter,
        };
        Failure(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> NetpeakStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            NetpeakStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            NetpeakStatus::Panic
        }
    }
}

/// # Safety
/// `s` must be null or point to a nul-terminated string.
unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(Failure(NetpeakStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure(NetpeakStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn null(what: &str) -> Failure {
    Failure(NetpeakStatus::NullPointer, format!("{what} is null"))
}

fn boxed(config: RunConfig) -> *mut NetpeakModel {
    Box::into_raw(Box::new(NetpeakModel { config }))
}

/// Create a model with the built-in parameters and presets.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn netpeak_model_new_default(out: *mut *mut NetpeakModel) -> NetpeakStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = boxed(RunConfig::defaults());
        Ok(())
    })
}

/// Create a model from a TOML document merged onto the defaults.
///
/// # Safety
/// `toml` must be a nul-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn netpeak_model_from_toml(toml: *const c_char, out: *mut *mut NetpeakModel) -> NetpeakStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = read_str(toml, "toml")?;
        *out = boxed(RunConfig::from_toml_str(text)?);
        Ok(())
    })
}

/// Release a model. Null is ignored.
///
/// # Safety
/// `model` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn netpeak_model_free(model: *mut NetpeakModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of scenario presets held by the model.
///
/// # Safety
/// `model` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn netpeak_model_scenario_count(model: *const NetpeakModel, out: *mut usize) -> NetpeakStatus {
    guard(|| {
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = model.config.scenarios.len();
        Ok(())
    })
}

fn evaluate(model: &NetpeakModel, scenario: &str) -> Result<EnergyReport, Failure> {
    let config = &model.config;
    let report = config.model.evaluate(config.scenario(scenario)?)?;
    let base = config.model.evaluate(config.baseline_scenario())?;
    Ok(report.with_delta(&base))
}

/// Evaluate a named preset.
///
/// # Safety
/// `model` must be a live handle, `scenario` a nul-terminated string and
/// `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn netpeak_evaluate(
    model: *const NetpeakModel,
    scenario: *const c_char,
    out: *mut NetpeakTotals,
) -> NetpeakStatus {
    guard(|| {
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        let name = read_str(scenario, "scenario")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let r = evaluate(model, name)?;
        let s = &r.segments;
        *out = NetpeakTotals {
            onu_gwh: s.onu.energy_gwh,
            access_gwh: s.access.energy_gwh,
            national_gwh: s.national.energy_gwh,
            longhaul_gwh: s.longhaul.energy_gwh,
            cdn_gwh: s.cdn.energy_gwh,
            home_cache_gwh: s.home_cache.energy_gwh,
            olt_cache_gwh: s.olt_cache.energy_gwh,
            dynamic_gwh: s.dynamic.energy_gwh,
            total_gwh: r.total_gwh,
            delta_gwh: r.delta.as_ref().map_or(0.0, |d| d.delta_gwh),
            volume_eb: r.volume_eb,
            efficiency_wh_per_gb: r.efficiency_wh_per_gb,
            subscribers_per_gpon: r.dimensions.access.subscribers_per_gpon,
        };
        Ok(())
    })
}

/// Evaluate a named preset into the full JSON report. Free the string with
/// [`netpeak_string_free`].
///
/// # Safety
/// `model` must be a live handle, `scenario` a nul-terminated string and
/// `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn netpeak_evaluate_json(
    model: *const NetpeakModel,
    scenario: *const c_char,
    out: *mut *mut c_char,
) -> NetpeakStatus {
    guard(|| {
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        let name = read_str(scenario, "scenario")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let report = evaluate(model, name)?;
        let json = serde_json::to_string(&report).expect("report serializes");
        *out = CString::new(json).expect("json has no nul").into_raw();
        Ok(())
    })
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn netpeak_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failed call on this thread, or an empty string. The
/// pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn netpeak_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Smallest `q` with `P(X > q) < eps` for `X ~ Binomial(n, p)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn netpeak_binomial_quantile(n: u64, p: f64, eps: f64, out: *mut u64) -> NetpeakStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let invalid = |e: netpeak::PeakStatsError| Failure(NetpeakStatus::InvalidParameter, e.to_string());
        let eps = ConfidenceLevel::new(eps).map_err(invalid)?;
        *out = binomial_quantile(n, p, eps).map_err(invalid)?;
        Ok(())
    })
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn netpeak_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
