//! C ABI over `tsagg`.
//!
//! Every fallible call returns a [`TsaggStatus`]; on failure a message is
//! available from [`tsagg_last_error`] on the same thread. Objects are opaque
//! handles released with their matching `_free` function. Strings returned by
//! the library are released with [`tsagg_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use tsagg::clustering::{basis_cluster, kmeans, normalize_features, ClusterModel, KMEANS_MAX_ITER, KMEANS_TOL};
use tsagg::data_io::{generate_synthetic, load_system, reports_to_json, DataError, SyntheticSpec, UnknownKeys};
use tsagg::dispatch::{solve_full, DispatchError, SystemData};
use tsagg::evaluation::{compare_methods, EvalError};
use tsagg::lp::{solve, LpError, LpStatus, StandardFormLp};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsaggStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Infeasible = 4,
    Unbounded = 5,
    Numerical = 6,
    Internal = 7,
}

/// Outcome of [`tsagg_lp_solve`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsaggLpStatus {
    Optimal = 0,
    Infeasible = 1,
    Unbounded = 2,
}

/// Dispatch system: generators, demand and capacity-factor series.
pub struct TsaggSystem(SystemData);

/// Hour-to-cluster partition.
pub struct TsaggClusterModel(ClusterModel);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(TsaggStatus, String);

impl From<LpError> for Failure {
    fn from(e: LpError) -> Self {
        let status = match e {
            LpError::NumericalFailure { .. } | LpError::SingularBasis { .. } => TsaggStatus::Numerical,
            _ => TsaggStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<DispatchError> for Failure {
    fn from(e: DispatchError) -> Self {
        let status = match e {
            DispatchError::Infeasible { .. } => TsaggStatus::Infeasible,
            DispatchError::Unbounded { .. } => TsaggStatus::Unbounded,
            DispatchError::Solver { .. } => TsaggStatus::Numerical,
            _ => TsaggStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<DataError> for Failure {
    fn from(e: DataError) -> Self {
        let status = match e {
            DataError::Io { .. } => TsaggStatus::Io,
            _ => TsaggStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn invalid<E: std::fmt::Display>(e: E) -> Failure {
    Failure(TsaggStatus::InvalidArgument, e.to_string())
}

fn null(name: &str) -> Failure {
    Failure(TsaggStatus::NullPointer, format!("{name} is null"))
}

/// Run `f`, record any error or panic, and return its status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TsaggStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            TsaggStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            TsaggStatus::Internal
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    unsafe { p.as_ref() }.ok_or_else(|| null(name))
}

unsafe fn put<T>(out: *mut T, value: T, name: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(name));
    }
    unsafe { out.write(value) };
    Ok(())
}

fn into_c_string(s: String) -> Result<*mut c_char, Failure> {
    Ok(CString::new(s).map_err(invalid)?.into_raw())
}

/// Message describing the last failure on this thread; empty after a
/// successful call. The pointer stays valid until the next library call.
#[no_mangle]
pub extern "C" fn tsagg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Release a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn tsagg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Load a system from a JSON config file. With `strict` nonzero, unknown
/// config keys are an error; otherwise they are logged and ignored.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tsagg_system_load(path: *const c_char, strict: i32, out: *mut *mut TsaggSystem) -> TsaggStatus {
    guard(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        let path = unsafe { CStr::from_ptr(path) }.to_str().map_err(invalid)?;
        let unknown = if strict != 0 { UnknownKeys::Reject } else { UnknownKeys::Warn };
        let system = load_system(Path::new(path), unknown)?;
        unsafe { put(out, Box::into_raw(Box::new(TsaggSystem(system))), "out") }
    })
}

/// Build the built-in synthetic wind/thermal/NSE system. `hours` of 0 means
/// a full year.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tsagg_system_synthetic(seed: u64, hours: usize, out: *mut *mut TsaggSystem) -> TsaggStatus {
    guard(|| {
        let mut spec = SyntheticSpec::default().with_seed(seed);
        if hours > 0 {
            spec.hours = hours;
        }
        let inst = generate_synthetic(&spec)?;
        unsafe { put(out, Box::into_raw(Box::new(TsaggSystem(inst.system))), "out") }
    })
}

/// # Safety
/// `system` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn tsagg_system_free(system: *mut TsaggSystem) {
    if !system.is_null() {
        drop(unsafe { Box::from_raw(system) });
    }
}

/// Number of hours, or 0 for a null handle.
///
/// # Safety
/// `system` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tsagg_system_horizon(system: *const TsaggSystem) -> usize {
    unsafe { system.as_ref() }.map_or(0, |s| s.0.horizon())
}

/// Total cost of the full hourly dispatch.
///
/// # Safety
/// `system` must be a live handle; `cost` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tsagg_solve_full_cost(system: *const TsaggSystem, cost: *mut f64) -> TsaggStatus {
    guard(|| {
        let system = unsafe { as_ref(system, "system") }?;
        let full = solve_full(&system.0)?;
        unsafe { put(cost, full.total_cost, "cost") }
    })
}

/// Group hours by their optimal dispatch basis.
///
/// # Safety
/// `system` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tsagg_basis_cluster(system: *const TsaggSystem, out: *mut *mut TsaggClusterModel) -> TsaggStatus {
    guard(|| {
        let system = unsafe { as_ref(system, "system") }?;
        let model = basis_cluster(&system.0).map_err(invalid)?;
        unsafe { put(out, Box::into_raw(Box::new(TsaggClusterModel(model))), "out") }
    })
}

/// k-means on normalized demand and capacity factors.
///
/// # Safety
/// `system` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tsagg_kmeans(
    system: *const TsaggSystem,
    k: usize,
    seed: u64,
    out: *mut *mut TsaggClusterModel,
) -> TsaggStatus {
    guard(|| {
        let system = unsafe { as_ref(system, "system") }?;
        let features = normalize_features(&system.0);
        let model = kmeans(&features, k, seed, KMEANS_MAX_ITER, KMEANS_TOL).map_err(invalid)?;
        unsafe { put(out, Box::into_raw(Box::new(TsaggClusterModel(model))), "out") }
    })
}

/// # Safety
/// `model` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn tsagg_cluster_model_free(model: *mut TsaggClusterModel) {
    if !model.is_null() {
        drop(unsafe { Box::from_raw(model) });
    }
}

/// Number of clusters, or 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tsagg_cluster_model_k(model: *const TsaggClusterModel) -> usize {
    unsafe { model.as_ref() }.map_or(0, |m| m.0.k)
}

/// Copy the cluster index of each hour into `buf`, which must hold at least
/// `tsagg_system_horizon` entries; `len` is its capacity.
///
/// # Safety
/// `model` must be a live handle; `buf` must be writable for `len` entries.
#[no_mangle]
pub unsafe extern "C" fn tsagg_cluster_model_assignment(
    model: *const TsaggClusterModel,
    buf: *mut usize,
    len: usize,
) -> TsaggStatus {
    guard(|| {
        let model = unsafe { as_ref(model, "model") }?;
        let assignment = &model.0.assignment;
        if buf.is_null() {
            return Err(null("buf"));
        }
        if len < assignment.len() {
            return Err(invalid(format!("buffer holds {len} entries, need {}", assignment.len())));
        }
        unsafe { ptr::copy_nonoverlapping(assignment.as_ptr(), buf, assignment.len()) };
        Ok(())
    })
}

/// Run k-means and basis-oriented aggregation and return both reports as a
/// JSON array `[kmeans, basis]`. Free the string with [`tsagg_string_free`].
///
/// # Safety
/// `system` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tsagg_compare_json(system: *const TsaggSystem, seed: u64, out: *mut *mut c_char) -> TsaggStatus {
    guard(|| {
        let system = unsafe { as_ref(system, "system") }?;
        let reports = compare_methods(&system.0, None, seed).map_err(|e| match e {
            EvalError::Dispatch(d) => Failure::from(d),
            e => invalid(e),
        })?;
        let json = reports_to_json(&reports)?;
        let s = into_c_string(json)?;
        unsafe { put(out, s, "out") }
    })
}

/// Solve `min cᵀx s.t. Ax = b, x ≥ 0` with `A` given row-major as `m × n`.
/// On success `x` (length `n`) and `objective` hold the optimum when
/// `status` is optimal; they are left untouched otherwise.
///
/// # Safety
/// `c` and `x` must hold `n` values, `a` `m·n`, `b` `m`; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn tsagg_lp_solve(
    m: usize,
    n: usize,
    c: *const f64,
    a: *const f64,
    b: *const f64,
    x: *mut f64,
    objective: *mut f64,
    status: *mut TsaggLpStatus,
) -> TsaggStatus {
    guard(|| {
        if c.is_null() || a.is_null() || b.is_null() {
            return Err(null("c, a or b"));
        }
        if x.is_null() || objective.is_null() || status.is_null() {
            return Err(null("x, objective or status"));
        }
        let c = unsafe { std::slice::from_raw_parts(c, n) }.to_vec();
        let a = unsafe { std::slice::from_raw_parts(a, m * n) };
        let b = unsafe { std::slice::from_raw_parts(b, m) }.to_vec();
        let rows = a.chunks(n.max(1)).take(m).map(<[f64]>::to_vec).collect();
        let lp = StandardFormLp::new(c, rows, b)?;
        let sol = solve(&lp)?;
        let outcome = match sol.status {
            LpStatus::Optimal => TsaggLpStatus::Optimal,
            LpStatus::Infeasible => TsaggLpStatus::Infeasible,
            LpStatus::Unbounded => TsaggLpStatus::Unbounded,
            other => return Err(Failure(TsaggStatus::Internal, format!("unexpected status {other:?}"))),
        };
        if outcome == TsaggLpStatus::Optimal {
            unsafe {
                ptr::copy_nonoverlapping(sol.x.as_ptr(), x, n);
                objective.write(sol.objective);
            }
        }
        unsafe { status.write(outcome) };
        Ok(())
    })
}
