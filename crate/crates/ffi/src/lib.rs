//! C ABI over `d2d_cache`.
//!
//! Every function returns a [`D2dStatus`]; results come back through out
//! pointers. On failure, `d2d_last_error_message` describes the most recent
//! error on the calling thread. Handles are not thread-safe; use one per
//! thread or serialise access.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use d2d_cache::experiments::{parse_config, run_preset, write_results, ExperimentPreset, OutputFormat, PresetName};
use d2d_cache::simulator::{estimate_per_object_success, estimate_total_success, SimulationConfig};
use d2d_cache::{analytics, Error, MetricEstimate};

/// Opaque experiment handle: a preset plus any overrides applied to it.
pub struct D2dScenario {
    preset: ExperimentPreset,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum D2dStatus {
    Ok = 0,
    NullPointer = 1,
    /// Bad configuration or argument.
    InvalidArgument = 2,
    /// Numerical failure.
    Numeric = 3,
    /// I/O or serialisation failure.
    Io = 4,
    /// A Rust panic was caught at the boundary.
    Panic = 5,
}

/// Estimate with standard error; `sample_count` is 0 for exact values.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct D2dEstimate {
    pub value: f64,
    pub standard_error: f64,
    pub sample_count: u64,
}

impl From<MetricEstimate> for D2dEstimate {
    fn from(m: MetricEstimate) -> Self {
        D2dEstimate {
            value: m.value,
            standard_error: m.standard_error,
            sample_count: m.sample_count,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

enum Failure {
    Null(&'static str),
    Invalid(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn status_of(e: &Error) -> D2dStatus {
    match e.root() {
        _ if e.is_config() => D2dStatus::InvalidArgument,
        Error::Io { .. } | Error::Csv(_) | Error::Json(_) => D2dStatus::Io,
        _ => D2dStatus::Numeric,
    }
}

/// Runs `f`, converting errors and panics into a status and last-error message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> D2dStatus {
    let (status, message) = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => return D2dStatus::Ok,
        Ok(Err(Failure::Null(what))) => (D2dStatus::NullPointer, format!("null pointer: {what}")),
        Ok(Err(Failure::Invalid(m))) => (D2dStatus::InvalidArgument, m),
        Ok(Err(Failure::Core(e))) => (status_of(&e), e.to_string()),
        Err(payload) => {
            let m = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            (D2dStatus::Panic, format!("panic: {m}"))
        }
    };
    set_last_error(&message);
    status
}

unsafe fn text<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure::Invalid(format!("{what} is not UTF-8: {e}")))
}

unsafe fn handle<'a>(h: *const D2dScenario) -> Result<&'a D2dScenario, Failure> {
    h.as_ref().ok_or(Failure::Null("scenario"))
}

unsafe fn handle_mut<'a>(h: *mut D2dScenario) -> Result<&'a mut D2dScenario, Failure> {
    h.as_mut().ok_or(Failure::Null("scenario"))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    out.write(value);
    Ok(())
}

fn boxed(preset: ExperimentPreset) -> *mut D2dScenario {
    Box::into_raw(Box::new(D2dScenario { preset }))
}

fn check(preset: &ExperimentPreset) -> Result<(), Failure> {
    preset.validate().map_err(|e| Failure::Invalid(e.to_string()))
}

/// Crate version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn d2d_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread; empty if none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn d2d_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates a handle from a built-in preset name such as `"validate_audio"`.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn d2d_scenario_from_preset(name: *const c_char, out: *mut *mut D2dScenario) -> D2dStatus {
    guard(|| {
        let name: PresetName = text(name, "name")?.parse()?;
        put(out, boxed(ExperimentPreset::named(name)))
    })
}

/// Creates a handle from TOML experiment text, in the CLI config format.
///
/// # Safety
/// `toml` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn d2d_scenario_from_config(toml: *const c_char, out: *mut *mut D2dScenario) -> D2dStatus {
    guard(|| {
        let preset = parse_config(text(toml, "toml")?, "<ffi>")?;
        put(out, boxed(preset))
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `h` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn d2d_scenario_free(h: *mut D2dScenario) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Sets the mean transmitter lifespan in seconds, keeping the law family.
///
/// # Safety
/// `h` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn d2d_scenario_set_mean_lifespan(h: *mut D2dScenario, seconds: f64) -> D2dStatus {
    guard(|| {
        let s = handle_mut(h)?;
        let lifespan = s.preset.scenario.lifespan.with_mean(seconds)?;
        s.preset.scenario.lifespan = lifespan;
        Ok(())
    })
}

/// Sets the transmitter density in nodes per square metre.
///
/// # Safety
/// `h` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn d2d_scenario_set_density(h: *mut D2dScenario, density: f64) -> D2dStatus {
    guard(|| {
        let s = handle_mut(h)?;
        let mut next = s.preset.clone();
        next.scenario.density = density;
        check(&next)?;
        s.preset = next;
        Ok(())
    })
}

/// Number of objects in the catalogue.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn d2d_scenario_catalogue_size(h: *const D2dScenario, out: *mut usize) -> D2dStatus {
    guard(|| put(out, handle(h)?.preset.scenario.catalogue_size))
}

/// Closed-form total success probability of the base scenario.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn d2d_total_success(h: *const D2dScenario, out: *mut f64) -> D2dStatus {
    guard(|| {
        let scenario = handle(h)?.preset.variant_scenario(0)?;
        put(out, analytics::total_success(&scenario)?.value)
    })
}

/// Closed-form success probability of one object (0-based index).
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn d2d_per_object_success(h: *const D2dScenario, object: usize, out: *mut f64) -> D2dStatus {
    guard(|| {
        let scenario = handle(h)?.preset.variant_scenario(0)?;
        put(out, analytics::per_object_success(&scenario, object)?.value)
    })
}

/// Monte Carlo estimate of the total success probability.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn d2d_simulate_total(
    h: *const D2dScenario,
    iterations: u64,
    seed: u64,
    out: *mut D2dEstimate,
) -> D2dStatus {
    guard(|| {
        let scenario = handle(h)?.preset.variant_scenario(0)?;
        let est = estimate_total_success(&SimulationConfig::new(scenario, iterations, seed))?;
        put(out, est.into())
    })
}

/// Monte Carlo estimate for one object (0-based index), always requesting it.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn d2d_simulate_per_object(
    h: *const D2dScenario,
    object: usize,
    iterations: u64,
    seed: u64,
    out: *mut D2dEstimate,
) -> D2dStatus {
    guard(|| {
        let scenario = handle(h)?.preset.variant_scenario(0)?;
        let est = estimate_per_object_success(&SimulationConfig::new(scenario, iterations, seed), object)?;
        put(out, est.into())
    })
}

/// Runs every sweep and variant of the handle's experiment and returns the
/// result table as CSV. Free the string with `d2d_string_free`.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn d2d_run_csv(h: *const D2dScenario, out: *mut *mut c_char) -> D2dStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let rows = run_preset(&handle(h)?.preset)?;
        let mut buf = Vec::new();
        write_results(&rows, OutputFormat::Csv, &mut buf)?;
        let csv = CString::new(buf).map_err(|e| Failure::Invalid(e.to_string()))?;
        put(out, csv.into_raw())
    })
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn d2d_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
