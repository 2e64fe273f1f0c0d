//! C ABI over the `climact` library.
//!
//! Objects are opaque handles created by `climact_*_new`/`load`/`fit`
//! functions and released with the matching `*_free`. Every fallible call
//! returns a [`ClimactStatus`]; on failure the message is available through
//! [`climact_last_error`] on the same thread. Strings are copied into
//! caller-provided buffers, so no string ever needs to be freed.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use climact::inference::{fit, FitConfig, FitResult};
use climact::ingestion::{load_dataset, DatasetPaths, LoadOptions};
use climact::model::{
    forward_sample, parse_groups, random_catalog, Dataset, Hyperparameters, MediaGenerator, ModelParameters, Structure,
};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClimactStatus {
    Ok = 0,
    /// A required pointer was null or a string was not UTF-8.
    InvalidArgument = 1,
    /// Inputs failed validation (schema, dimensions, values).
    Validation = 2,
    /// Fitting failed: every restart diverged or a gradient was non-finite.
    Inference = 3,
    /// File system error.
    Io = 4,
    /// An index was out of range.
    OutOfRange = 5,
    /// Internal panic; the handle involved should not be reused.
    Panic = 6,
}

/// A loaded or simulated dataset.
pub struct ClimactDataset {
    inner: Dataset,
}

/// The outcome of a fit.
pub struct ClimactFit {
    inner: FitResult,
}

/// Plain-value fit settings. Obtain defaults from [`climact_fit_config_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct ClimactFitConfig {
    pub learning_rate: f64,
    pub n_restarts: u32,
    pub n_steps: u32,
    pub n_predictive_samples: u32,
    pub seed: u64,
    pub var_s: f64,
    /// Relative early-stopping tolerance; 0 disables early stopping.
    pub early_stop_tol: f64,
}

/// Posterior summary of one parameter.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct ClimactParameter {
    pub mean: f64,
    pub sd: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(err: &climact::Error) -> ClimactStatus {
    match err {
        climact::Error::Io { .. } => ClimactStatus::Io,
        e if !e.is_validation() => ClimactStatus::Inference,
        _ => ClimactStatus::Validation,
    }
}

fn guard(f: impl FnOnce() -> Result<(), ClimactStatus>) -> ClimactStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            ClimactStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            ClimactStatus::Panic
        }
    }
}

fn lib<T>(r: climact::Result<T>) -> Result<T, ClimactStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn arg_err(msg: &str) -> ClimactStatus {
    set_error(msg);
    ClimactStatus::InvalidArgument
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, ClimactStatus> {
    if p.is_null() {
        return Err(arg_err(&format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| arg_err(&format!("{name} is not valid UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, ClimactStatus> {
    p.as_mut().ok_or_else(|| arg_err(&format!("{name} is null")))
}

unsafe fn handle<'a, T>(p: *const T, name: &str) -> Result<&'a T, ClimactStatus> {
    p.as_ref().ok_or_else(|| arg_err(&format!("{name} is null")))
}

/// Copies `s` NUL-terminated into `buf` (truncating to `len - 1` bytes) and
/// returns the full length excluding the terminator.
unsafe fn copy_out(s: &str, buf: *mut c_char, len: usize) -> usize {
    if !buf.is_null() && len > 0 {
        let n = s.len().min(len - 1);
        ptr::copy_nonoverlapping(s.as_ptr().cast::<c_char>(), buf, n);
        *buf.add(n) = 0;
    }
    s.len()
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn climact_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the last error message of this thread into `buf` and returns its
/// length. Pass a null buffer to query the length.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn climact_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| copy_out(&e.borrow(), buf, len))
}

/// Loads `catalog.csv`, `users.csv` and the optional media files from `dir`.
///
/// # Safety
/// `dir` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn climact_dataset_load(
    dir: *const c_char,
    standardize: bool,
    gap_enabled: bool,
    out: *mut *mut ClimactDataset,
) -> ClimactStatus {
    guard(|| {
        let dir = str_arg(dir, "dir")?;
        let out = out_arg(out, "out")?;
        let options = LoadOptions {
            gap_enabled,
            standardize,
        };
        let loaded = lib(load_dataset(&DatasetPaths::in_dir(&PathBuf::from(dir)), &options))?;
        *out = Box::into_raw(Box::new(ClimactDataset { inner: loaded.dataset }));
        Ok(())
    })
}

/// Simulates `n_users` users over a random catalog of `k` subreddits with the
/// built-in example parameters.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn climact_dataset_simulate(
    k: usize,
    n_users: usize,
    var_s: f64,
    seed: u64,
    out: *mut *mut ClimactDataset,
) -> ClimactStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let catalog = lib(random_catalog(k, seed.wrapping_add(1)))?;
        let hyper = Hyperparameters::with_var_s(var_s);
        lib(hyper.validate())?;
        let (users, _) = lib(forward_sample(
            &ModelParameters::example(),
            &catalog,
            &hyper,
            n_users,
            &MediaGenerator::default(),
            seed,
        ))?;
        let inner = lib(Dataset::new(catalog, users))?;
        *out = Box::into_raw(Box::new(ClimactDataset { inner }));
        Ok(())
    })
}

/// # Safety
/// `ds` must be a live dataset handle or null.
#[no_mangle]
pub unsafe extern "C" fn climact_dataset_n_users(ds: *const ClimactDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.inner.n_users())
}

/// # Safety
/// `ds` must be a live dataset handle or null.
#[no_mangle]
pub unsafe extern "C" fn climact_dataset_n_subreddits(ds: *const ClimactDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.inner.catalog.len())
}

/// Fraction of activated users, or NaN for a null handle.
///
/// # Safety
/// `ds` must be a live dataset handle or null.
#[no_mangle]
pub unsafe extern "C" fn climact_dataset_activation_rate(ds: *const ClimactDataset) -> f64 {
    ds.as_ref().map_or(f64::NAN, |d| d.inner.activation_rate())
}

/// # Safety
/// `ds` must be a handle from this library, not yet freed, or null.
#[no_mangle]
pub unsafe extern "C" fn climact_dataset_free(ds: *mut ClimactDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Fills `cfg` with the library defaults.
///
/// # Safety
/// `cfg` must be writable.
#[no_mangle]
pub unsafe extern "C" fn climact_fit_config_default(cfg: *mut ClimactFitConfig) -> ClimactStatus {
    guard(|| {
        let cfg = out_arg(cfg, "cfg")?;
        let d = FitConfig::default();
        *cfg = ClimactFitConfig {
            learning_rate: d.learning_rate,
            n_restarts: d.n_restarts as u32,
            n_steps: d.n_steps as u32,
            n_predictive_samples: d.n_predictive_samples as u32,
            seed: d.seed,
            var_s: d.var_s,
            early_stop_tol: d.early_stop_rel_tol.unwrap_or(0.0),
        };
        Ok(())
    })
}

/// Fits the network to `ds`. `removed_groups` is null for the full network
/// or a comma-separated subset of `E,I,M,D`.
///
/// # Safety
/// `ds` must be a live dataset handle, `cfg` readable, `removed_groups` null
/// or NUL-terminated, and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn climact_fit(
    ds: *const ClimactDataset,
    cfg: *const ClimactFitConfig,
    removed_groups: *const c_char,
    out: *mut *mut ClimactFit,
) -> ClimactStatus {
    guard(|| {
        let ds = handle(ds, "ds")?;
        let cfg = handle(cfg, "cfg")?;
        let out = out_arg(out, "out")?;
        let structure = if removed_groups.is_null() {
            Structure::full()
        } else {
            Structure::without(lib(parse_groups(str_arg(removed_groups, "removed_groups")?))?)
        };
        let config = FitConfig {
            learning_rate: cfg.learning_rate,
            n_restarts: cfg.n_restarts as usize,
            n_steps: cfg.n_steps as usize,
            n_predictive_samples: cfg.n_predictive_samples as usize,
            seed: cfg.seed,
            var_s: cfg.var_s,
            early_stop_rel_tol: (cfg.early_stop_tol > 0.0).then_some(cfg.early_stop_tol),
            ..FitConfig::default()
        };
        let result = lib(fit(&ds.inner, &Hyperparameters::default(), &structure, &config))?;
        *out = Box::into_raw(Box::new(ClimactFit { inner: result }));
        Ok(())
    })
}

/// Posterior predictive accuracy of the selected restart, or NaN for a null
/// handle.
///
/// # Safety
/// `f` must be a live fit handle or null.
#[no_mangle]
pub unsafe extern "C" fn climact_fit_accuracy(f: *const ClimactFit) -> f64 {
    f.as_ref().map_or(f64::NAN, |f| f.inner.accuracy())
}

/// # Safety
/// `f` must be a live fit handle or null.
#[no_mangle]
pub unsafe extern "C" fn climact_fit_n_parameters(f: *const ClimactFit) -> usize {
    f.as_ref().map_or(0, |f| f.inner.parameters.len())
}

/// # Safety
/// `f` must be a live fit handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn climact_fit_parameter(
    f: *const ClimactFit,
    index: usize,
    out: *mut ClimactParameter,
) -> ClimactStatus {
    guard(|| {
        let f = handle(f, "fit")?;
        let out = out_arg(out, "out")?;
        let p = f.inner.parameters.get(index).ok_or_else(|| {
            set_error(format!("parameter index {index} out of range"));
            ClimactStatus::OutOfRange
        })?;
        *out = ClimactParameter {
            mean: p.mean,
            sd: p.sd,
            ci_low: p.ci_low,
            ci_high: p.ci_high,
        };
        Ok(())
    })
}

/// Index of the parameter called `name`, or -1 when absent.
///
/// # Safety
/// `f` must be a live fit handle or null; `name` NUL-terminated or null.
#[no_mangle]
pub unsafe extern "C" fn climact_fit_parameter_index(f: *const ClimactFit, name: *const c_char) -> i64 {
    let (Some(f), false) = (f.as_ref(), name.is_null()) else {
        return -1;
    };
    let Ok(name) = CStr::from_ptr(name).to_str() else {
        return -1;
    };
    f.inner
        .parameters
        .iter()
        .position(|p| p.name == name)
        .map_or(-1, |i| i as i64)
}

/// Copies the name of parameter `index` into `buf`; returns its length, or 0
/// when the index is out of range.
///
/// # Safety
/// `f` must be a live fit handle or null; `buf` null or `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn climact_fit_parameter_name(
    f: *const ClimactFit,
    index: usize,
    buf: *mut c_char,
    len: usize,
) -> usize {
    match f.as_ref().and_then(|f| f.inner.parameters.get(index)) {
        Some(p) => copy_out(&p.name, buf, len),
        None => 0,
    }
}

/// Copies the fit result as JSON into `buf`; returns the full length. Pass a
/// null buffer to query the size.
///
/// # Safety
/// `f` must be a live fit handle or null; `buf` null or `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn climact_fit_to_json(f: *const ClimactFit, buf: *mut c_char, len: usize) -> usize {
    match f.as_ref().and_then(|f| serde_json::to_string(&f.inner).ok()) {
        Some(s) => copy_out(&s, buf, len),
        None => 0,
    }
}

/// # Safety
/// `f` must be a handle from this library, not yet freed, or null.
#[no_mangle]
pub unsafe extern "C" fn climact_fit_free(f: *mut ClimactFit) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}
