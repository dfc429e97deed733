//! C interface to `implied_svm`.
//!
//! Every function returns an `ISVM_*` status code and writes results through
//! out-pointers. On failure the message is kept per thread and can be read
//! with [`isvm_last_error`]. Objects are opaque handles released with their
//! `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use implied_svm::calibrate::{self, PlattParams};
use implied_svm::data::{self, Dataset, Label};
use implied_svm::implied::{self, GridConfig, GridMode, HyperplaneGrid};
use implied_svm::kernel_svm::{self, KernelSpec, PenaltyConfig, SolverOptions, SvmModel};
use implied_svm::weighting::{self, EffectiveCounts};
use implied_svm::Error;

pub const ISVM_OK: i32 = 0;
pub const ISVM_ERR_NULL: i32 = 1;
pub const ISVM_ERR_INVALID_ARGUMENT: i32 = 2;
pub const ISVM_ERR_DATA: i32 = 3;
pub const ISVM_ERR_NONCONVERGENCE: i32 = 4;
pub const ISVM_ERR_IO: i32 = 5;
pub const ISVM_ERR_PANIC: i32 = 6;

pub const ISVM_KERNEL_LINEAR: i32 = 0;
pub const ISVM_KERNEL_RBF: i32 = 1;

pub const ISVM_GRID_EXACT: i32 = 0;
pub const ISVM_GRID_BALANCED: i32 = 1;

/// Labelled feature matrix.
pub struct IsvmDataset(Dataset);

/// Trained SVM.
pub struct IsvmModel(SvmModel);

/// Hyperplane grid.
pub struct IsvmGrid(HyperplaneGrid);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match root(&e) {
            Error::NonConvergence { .. } => ISVM_ERR_NONCONVERGENCE,
            Error::Io { .. } => ISVM_ERR_IO,
            Error::InvalidArgument(_) => ISVM_ERR_INVALID_ARGUMENT,
            _ => ISVM_ERR_DATA,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn root(e: &Error) -> &Error {
    match e {
        Error::GridLevel { source, .. } => root(source),
        other => other,
    }
}

fn null(name: &str) -> Failure {
    Failure {
        code: ISVM_ERR_NULL,
        message: format!("{name} is null"),
    }
}

fn bad(message: impl Into<String>) -> Failure {
    Failure {
        code: ISVM_ERR_INVALID_ARGUMENT,
        message: message.into(),
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ISVM_OK,
        Ok(Err(fail)) => {
            set_last_error(fail.message);
            fail.code
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            ISVM_ERR_PANIC
        }
    }
}

unsafe fn slice<'a, T>(p: *const T, n: usize, name: &str) -> Result<&'a [T], Failure> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(unsafe { std::slice::from_raw_parts(p, n) })
}

unsafe fn reference<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    unsafe { p.as_ref() }.ok_or_else(|| null(name))
}

unsafe fn write<T>(out: *mut T, value: T, name: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(name));
    }
    unsafe { out.write(value) };
    Ok(())
}

unsafe fn string(p: *const c_char, name: &str) -> Result<String, Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map(str::to_owned)
        .map_err(|_| bad(format!("{name} is not valid UTF-8")))
}

fn kernel(kind: i32, gamma: f64) -> Result<KernelSpec, Failure> {
    match kind {
        ISVM_KERNEL_LINEAR => Ok(KernelSpec::Linear),
        ISVM_KERNEL_RBF => Ok(KernelSpec::rbf(gamma)?),
        other => Err(bad(format!("unknown kernel kind {other}"))),
    }
}

fn labels_from_signs(signs: &[i32]) -> Result<Vec<Label>, Failure> {
    signs
        .iter()
        .map(|s| Label::from_sign(i64::from(*s)).ok_or_else(|| bad(format!("label {s} is not +1 or -1"))))
        .collect()
}

/// Message of the last failed call on this thread, or null. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn isvm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a dataset from `n` row-major rows of `dim` features and labels in {+1, -1}.
///
/// # Safety
/// `features` must point to `n * dim` doubles, `labels` to `n` ints.
#[no_mangle]
pub unsafe extern "C" fn isvm_dataset_new(
    features: *const f64,
    n: usize,
    dim: usize,
    labels: *const i32,
    out: *mut *mut IsvmDataset,
) -> i32 {
    guard(|| {
        let total = n.checked_mul(dim).ok_or_else(|| bad("n * dim overflows"))?;
        let x = unsafe { slice(features, total, "features")? }.to_vec();
        let y = labels_from_signs(unsafe { slice(labels, n, "labels")? })?;
        let ds = Dataset::new(x, dim, y, (0..n).collect())?;
        unsafe { write(out, Box::into_raw(Box::new(IsvmDataset(ds))), "out") }
    })
}

/// Reads a comma- or whitespace-separated file.
///
/// # Safety
/// `path` and `positive_label` must be NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn isvm_dataset_load_csv(
    path: *const c_char,
    label_column: usize,
    positive_label: *const c_char,
    out: *mut *mut IsvmDataset,
) -> i32 {
    guard(|| {
        let path = PathBuf::from(unsafe { string(path, "path")? });
        let token = unsafe { string(positive_label, "positive_label")? };
        let ds = data::load_csv(&path, label_column, &token)?;
        unsafe { write(out, Box::into_raw(Box::new(IsvmDataset(ds))), "out") }
    })
}

/// # Safety
/// `ds` must be a live dataset handle; `n` and `dim` may be null.
#[no_mangle]
pub unsafe extern "C" fn isvm_dataset_shape(ds: *const IsvmDataset, n: *mut usize, dim: *mut usize) -> i32 {
    guard(|| {
        let ds = unsafe { reference(ds, "ds")? };
        if !n.is_null() {
            unsafe { n.write(ds.0.len()) };
        }
        if !dim.is_null() {
            unsafe { dim.write(ds.0.dim()) };
        }
        Ok(())
    })
}

/// # Safety
/// `ds` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn isvm_dataset_free(ds: *mut IsvmDataset) {
    if !ds.is_null() {
        drop(unsafe { Box::from_raw(ds) });
    }
}

/// Trains a class-weighted SVM with penalties `c_plus`, `c_minus`.
///
/// # Safety
/// `ds` must be a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn isvm_model_train(
    ds: *const IsvmDataset,
    kernel_kind: i32,
    gamma: f64,
    c_plus: f64,
    c_minus: f64,
    tol: f64,
    max_iter: u64,
    out: *mut *mut IsvmModel,
) -> i32 {
    guard(|| {
        let ds = unsafe { reference(ds, "ds")? };
        let k = kernel(kernel_kind, gamma)?;
        let p = PenaltyConfig::new(c_plus, c_minus)?;
        let (model, _) = kernel_svm::train_weighted_svm(&ds.0, k, p, tol, max_iter)?;
        unsafe { write(out, Box::into_raw(Box::new(IsvmModel(model))), "out") }
    })
}

/// # Safety
/// `model` must be live and `x` must point to `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn isvm_model_decision_value(
    model: *const IsvmModel,
    x: *const f64,
    dim: usize,
    out: *mut f64,
) -> i32 {
    guard(|| {
        let m = unsafe { reference(model, "model")? };
        let x = unsafe { slice(x, dim, "x")? };
        let f = m.0.decision_value(x)?;
        unsafe { write(out, f, "out") }
    })
}

/// # Safety
/// `model` must be live and `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn isvm_model_save(model: *const IsvmModel, path: *const c_char) -> i32 {
    guard(|| {
        let m = unsafe { reference(model, "model")? };
        let path = unsafe { string(path, "path")? };
        Ok(m.0.save(path, None)?)
    })
}

/// # Safety
/// `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn isvm_model_load(path: *const c_char, out: *mut *mut IsvmModel) -> i32 {
    guard(|| {
        let path = unsafe { string(path, "path")? };
        let (model, _) = SvmModel::load(path)?;
        unsafe { write(out, Box::into_raw(Box::new(IsvmModel(model))), "out") }
    })
}

/// # Safety
/// `model` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn isvm_model_free(model: *mut IsvmModel) {
    if !model.is_null() {
        drop(unsafe { Box::from_raw(model) });
    }
}

/// Trains `k` reweighted models around base penalties `c_plus`, `c_minus`.
///
/// # Safety
/// `ds` must be a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn isvm_grid_build(
    ds: *const IsvmDataset,
    kernel_kind: i32,
    gamma: f64,
    c_plus: f64,
    c_minus: f64,
    k: usize,
    mode: i32,
    tol: f64,
    max_iter: u64,
    out: *mut *mut IsvmGrid,
) -> i32 {
    guard(|| {
        let ds = unsafe { reference(ds, "ds")? };
        let kern = kernel(kernel_kind, gamma)?;
        let base = PenaltyConfig::new(c_plus, c_minus)?;
        let mode = match mode {
            ISVM_GRID_EXACT => GridMode::Exact,
            ISVM_GRID_BALANCED => GridMode::BalancedAssumption,
            other => return Err(bad(format!("unknown grid mode {other}"))),
        };
        let mut config = GridConfig::new(k, mode);
        config.solver = SolverOptions::new(tol, max_iter)?;
        let grid = implied::build_hyperplane_grid(&ds.0, kern, base, &config)?;
        unsafe { write(out, Box::into_raw(Box::new(IsvmGrid(grid))), "out") }
    })
}

/// Number of trained (non-fictitious) models.
///
/// # Safety
/// `grid` must be live.
#[no_mangle]
pub unsafe extern "C" fn isvm_grid_size(grid: *const IsvmGrid, out: *mut usize) -> i32 {
    guard(|| {
        let g = unsafe { reference(grid, "grid")? };
        unsafe { write(out, g.0.k(), "out") }
    })
}

/// Implied posterior of the positive class at `x`. `degenerate` may be null.
///
/// # Safety
/// `grid` must be live and `x` must point to `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn isvm_grid_estimate(
    grid: *const IsvmGrid,
    x: *const f64,
    dim: usize,
    eps_on_plane: f64,
    value: *mut f64,
    degenerate: *mut bool,
) -> i32 {
    guard(|| {
        let g = unsafe { reference(grid, "grid")? };
        let x = unsafe { slice(x, dim, "x")? };
        let est = implied::vote_estimate(&g.0, x, eps_on_plane)?;
        if !degenerate.is_null() {
            unsafe { degenerate.write(est.degenerate) };
        }
        unsafe { write(value, est.value, "value") }
    })
}

/// # Safety
/// `grid` must be live and `manifest` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn isvm_grid_save(grid: *const IsvmGrid, manifest: *const c_char) -> i32 {
    guard(|| {
        let g = unsafe { reference(grid, "grid")? };
        let path = unsafe { string(manifest, "manifest")? };
        Ok(g.0.save(path, None)?)
    })
}

/// # Safety
/// `manifest` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn isvm_grid_load(manifest: *const c_char, out: *mut *mut IsvmGrid) -> i32 {
    guard(|| {
        let path = unsafe { string(manifest, "manifest")? };
        let (grid, _) = HyperplaneGrid::load(path)?;
        unsafe { write(out, Box::into_raw(Box::new(IsvmGrid(grid))), "out") }
    })
}

/// # Safety
/// `grid` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn isvm_grid_free(grid: *mut IsvmGrid) {
    if !grid.is_null() {
        drop(unsafe { Box::from_raw(grid) });
    }
}

/// Implied posterior for weight `z_plus` given effective counts.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn isvm_implied_probability(z_plus: f64, e_plus: f64, e_minus: f64, out: *mut f64) -> i32 {
    guard(|| {
        let counts = EffectiveCounts::new(e_plus, e_minus)?;
        let p = weighting::implied_probability_general(z_plus, &counts)?;
        unsafe { write(out, p, "out") }
    })
}

/// Weight `z_plus` whose implied posterior is `p`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn isvm_z_plus_for_probability(p: f64, e_plus: f64, e_minus: f64, out: *mut f64) -> i32 {
    guard(|| {
        let counts = EffectiveCounts::new(e_plus, e_minus)?;
        let z = weighting::z_plus_for_target_probability(p, &counts)?;
        unsafe { write(out, z, "out") }
    })
}

/// Fits Platt's sigmoid to scores with labels in {+1, -1}.
///
/// # Safety
/// `scores` and `labels` must point to `n` elements.
#[no_mangle]
pub unsafe extern "C" fn isvm_platt_fit(
    scores: *const f64,
    labels: *const i32,
    n: usize,
    a: *mut f64,
    b: *mut f64,
) -> i32 {
    guard(|| {
        let s = unsafe { slice(scores, n, "scores")? };
        let y = labels_from_signs(unsafe { slice(labels, n, "labels")? })?;
        let p = calibrate::fit_platt(s, &y)?;
        unsafe {
            write(a, p.a, "a")?;
            write(b, p.b, "b")
        }
    })
}

#[no_mangle]
pub extern "C" fn isvm_platt_apply(a: f64, b: f64, score: f64) -> f64 {
    calibrate::apply_platt(PlattParams { a, b }, score)
}

/// Area under the ROC curve; labels in {0, 1}.
///
/// # Safety
/// `scores` and `labels01` must point to `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn isvm_auc(scores: *const f64, labels01: *const f64, n: usize, out: *mut f64) -> i32 {
    guard(|| {
        let s = unsafe { slice(scores, n, "scores")? };
        let y = unsafe { slice(labels01, n, "labels01")? };
        let roc = calibrate::roc_and_auc(s, y)?;
        unsafe { write(out, roc.auc, "out") }
    })
}

/// Mean distance of `estimates` from their isotonic fit against `labels01`.
///
/// # Safety
/// `estimates` and `labels01` must point to `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn isvm_calibration_score(
    estimates: *const f64,
    labels01: *const f64,
    n: usize,
    out: *mut f64,
) -> i32 {
    guard(|| {
        let e = unsafe { slice(estimates, n, "estimates")? };
        let y = unsafe { slice(labels01, n, "labels01")? };
        let iso = calibrate::fit_isotonic(e, y)?;
        let score = calibrate::calibration_score(e, &iso)?;
        unsafe { write(out, score, "out") }
    })
}
