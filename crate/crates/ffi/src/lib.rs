//! C ABI over the core crate.
//!
//! Handles are opaque and owned by the caller: every `*_new` pairs with a
//! `*_free`. Functions return a [`UrStatus`]; on failure the message is kept
//! per thread and read back with [`ur_last_error_message`]. Panics are caught
//! at the boundary and reported as `UR_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use uniregress::c1nn::C1nn;
use uniregress::ewa::MeanEstimator;
use uniregress::harness::{run, ExperimentConfig};
use uniregress::seed::child_rng;
use uniregress::spaces::{patho_loss, relaxed_triangle_constant, RealLine};
use uniregress::{Error, OnlineLearner};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidUtf8 = 3,
    UnknownScenario = 4,
    ComponentMismatch = 5,
    Io = 6,
    CorruptedState = 7,
    Internal = 8,
    Panic = 9,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(e: &Error) -> UrStatus {
    match e {
        Error::InvalidParameter(_) | Error::UnknownSuite(_) => UrStatus::InvalidArgument,
        Error::UnknownScenario(_) => UrStatus::UnknownScenario,
        Error::ComponentMismatch(_)
        | Error::UnsupportedNet
        | Error::MissingDenseSequence
        | Error::MissingFtime => UrStatus::ComponentMismatch,
        Error::Io(_) | Error::Json(_) => UrStatus::Io,
        Error::CorruptedState(_) => UrStatus::CorruptedState,
        _ => UrStatus::Internal,
    }
}

/// Runs `f`, recording any error or panic.
fn guard(f: impl FnOnce() -> Result<(), (UrStatus, String)>) -> UrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            UrStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside uniregress");
            UrStatus::Panic
        }
    }
}

fn lib<T>(r: uniregress::Result<T>) -> Result<T, (UrStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (UrStatus, String) {
    (UrStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (UrStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (UrStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

/// Copies the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length in bytes, excluding
/// the terminator.
///
/// # Safety
/// `buf` must be null or valid for `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ur_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

// ---------------------------------------------------------------------------

/// Mean estimation on the real line with loss `|a-b|^alpha`.
pub struct UrMeanEstimator {
    inner: MeanEstimator<RealLine>,
}

/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn ur_mean_estimator_new(
    alpha: f64,
    seed: u64,
    out: *mut *mut UrMeanEstimator,
) -> UrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner =
            lib(RealLine::new(alpha)
                .and_then(|s| MeanEstimator::new(s, child_rng(seed, "learner", 0))))?;
        *out = Box::into_raw(Box::new(UrMeanEstimator { inner }));
        Ok(())
    })
}

/// # Safety
/// `handle` must come from [`ur_mean_estimator_new`]; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ur_mean_estimator_predict(
    handle: *mut UrMeanEstimator,
    out: *mut f64,
) -> UrStatus {
    guard(|| {
        let h = handle.as_mut().ok_or_else(|| null("handle"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = lib(OnlineLearner::<(), f64>::predict(&mut h.inner, &()))?;
        Ok(())
    })
}

/// # Safety
/// `handle` must come from [`ur_mean_estimator_new`].
#[no_mangle]
pub unsafe extern "C" fn ur_mean_estimator_observe(
    handle: *mut UrMeanEstimator,
    y: f64,
) -> UrStatus {
    guard(|| {
        let h = handle.as_mut().ok_or_else(|| null("handle"))?;
        lib(OnlineLearner::<(), f64>::observe(&mut h.inner, &y))
    })
}

/// # Safety
/// `handle` must be null or come from [`ur_mean_estimator_new`], and is
/// invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn ur_mean_estimator_free(handle: *mut UrMeanEstimator) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

// ---------------------------------------------------------------------------

/// `(1+δ)C1NN` on real instances with real responses.
pub struct UrC1nn {
    inner: C1nn<f64, f64>,
}

/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn ur_c1nn_new(
    delta: f64,
    default_prediction: f64,
    seed: u64,
    out: *mut *mut UrC1nn,
) -> UrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = lib(C1nn::new(
            delta,
            default_prediction,
            child_rng(seed, "learner", 0),
        ))?;
        *out = Box::into_raw(Box::new(UrC1nn { inner }));
        Ok(())
    })
}

/// # Safety
/// `handle` must come from [`ur_c1nn_new`]; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ur_c1nn_predict(handle: *mut UrC1nn, x: f64, out: *mut f64) -> UrStatus {
    guard(|| {
        let h = handle.as_mut().ok_or_else(|| null("handle"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = lib(h.inner.predict(&x))?;
        Ok(())
    })
}

/// # Safety
/// `handle` must come from [`ur_c1nn_new`].
#[no_mangle]
pub unsafe extern "C" fn ur_c1nn_observe(handle: *mut UrC1nn, y: f64) -> UrStatus {
    guard(|| {
        let h = handle.as_mut().ok_or_else(|| null("handle"))?;
        lib(h.inner.observe(&y))
    })
}

/// # Safety
/// `handle` must be null or come from [`ur_c1nn_new`], and is invalid
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn ur_c1nn_free(handle: *mut UrC1nn) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

// ---------------------------------------------------------------------------

/// Loss between two points of the pathological countable space.
#[no_mangle]
pub extern "C" fn ur_patho_loss(i: u64, j: u64) -> f64 {
    patho_loss(i, j)
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ur_relaxed_triangle_constant(
    alpha: f64,
    eps: f64,
    out: *mut f64,
) -> UrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = lib(relaxed_triangle_constant(alpha, eps))?;
        Ok(())
    })
}

/// Runs a registered scenario, writes the CSV to `out_path` (and the JSON
/// summary beside it) and stores the final average excess in `excess_out`.
/// `out_path` and `excess_out` may be null.
///
/// # Safety
/// `scenario` must be a NUL-terminated string; `out_path` null or one;
/// `excess_out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn ur_run_scenario(
    scenario: *const c_char,
    horizon: usize,
    replicas: usize,
    seed: u64,
    out_path: *const c_char,
    excess_out: *mut f64,
) -> UrStatus {
    guard(|| {
        let name = read_str(scenario, "scenario")?;
        let output = lib(run(&ExperimentConfig::new(name, horizon, replicas, seed)))?;
        if !out_path.is_null() {
            let path = read_str(out_path, "out_path")?;
            lib(output.write(Path::new(path)))?;
        }
        if !excess_out.is_null() {
            *excess_out = output.trace.last().map_or(0.0, |r| r.excess_avg);
        }
        Ok(())
    })
}
