//! C ABI over `pathgap`.
//!
//! Operators are opaque heap handles created by [`pathgap_operator_new`]
//! and released with [`pathgap_operator_free`]. Every fallible call returns
//! a [`PathgapStatus`]; on failure a message is available from
//! [`pathgap_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pathgap::eigen::{default_residual_tol, eigenvalue, spectrum_low_with, sturm_count, DEFAULT_REL_TOL};
use pathgap::{assemble_hamiltonian, dirichlet_ground_energy, verify_all, Error, PathGraph, Potential};

/// Opaque operator handle.
pub struct PathgapOperator {
    inner: pathgap::TridiagonalOperator,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathgapStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NoConvergence = 3,
    BufferTooSmall = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathgapSpectrum {
    pub lambda0: f64,
    pub lambda1: f64,
    pub gap: f64,
    pub residual: f64,
    pub precision_limited: bool,
}

/// Bound values are NaN when the corresponding bound is unavailable.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathgapBoundsSummary {
    pub lambda0: f64,
    pub lambda1: f64,
    pub ground_lower: f64,
    pub ground_upper: f64,
    pub excited_lower: f64,
    pub excited_upper: f64,
    pub checks_total: usize,
    pub checks_applicable: usize,
    pub checks_failed: usize,
    pub all_applicable_hold: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn fail(status: PathgapStatus, msg: impl Into<String>) -> PathgapStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> PathgapStatus {
    let status = if e.is_numerical() { PathgapStatus::NoConvergence } else { PathgapStatus::InvalidArgument };
    fail(status, e.to_string())
}

fn guard<F: FnOnce() -> PathgapStatus>(f: F) -> PathgapStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(PathgapStatus::Panic, "internal panic"),
    }
}

/// Message for the last failed call on this thread (empty if none). The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pathgap_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn pathgap_status_string(status: PathgapStatus) -> *const c_char {
    let s: &'static CStr = match status {
        PathgapStatus::Ok => c"ok",
        PathgapStatus::NullPointer => c"null pointer",
        PathgapStatus::InvalidArgument => c"invalid argument",
        PathgapStatus::NoConvergence => c"numerical failure",
        PathgapStatus::BufferTooSmall => c"buffer too small",
        PathgapStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// Builds `H = L_k + Σ α_j δ_j`. With `len == 0` the potential is empty
/// (free Laplacian) and `sites`/`strengths` may be NULL.
///
/// # Safety
/// `sites` and `strengths` must each point to `len` readable values when
/// `len > 0`; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pathgap_operator_new(
    k: usize,
    sites: *const i64,
    strengths: *const f64,
    len: usize,
    out: *mut *mut PathgapOperator,
) -> PathgapStatus {
    guard(|| {
        if out.is_null() || (len > 0 && (sites.is_null() || strengths.is_null())) {
            return fail(PathgapStatus::NullPointer, "null argument");
        }
        let potential = if len == 0 {
            Potential::empty_baseline()
        } else {
            // SAFETY: caller guarantees `len` readable entries in each array.
            let (s, a) =
                unsafe { (std::slice::from_raw_parts(sites, len), std::slice::from_raw_parts(strengths, len)) };
            match Potential::new(s.iter().copied().zip(a.iter().copied())) {
                Ok(p) => p,
                Err(e) => return from_error(e),
            }
        };
        let op = match PathGraph::new(k).and_then(|g| assemble_hamiltonian(&g, &potential)) {
            Ok(op) => op,
            Err(e) => return from_error(e),
        };
        // SAFETY: `out` checked non-null.
        unsafe { *out = Box::into_raw(Box::new(PathgapOperator { inner: op })) };
        PathgapStatus::Ok
    })
}

/// Releases an operator. NULL is ignored.
///
/// # Safety
/// `op` must come from [`pathgap_operator_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pathgap_operator_free(op: *mut PathgapOperator) {
    if !op.is_null() {
        // SAFETY: pointer was produced by Box::into_raw.
        drop(unsafe { Box::from_raw(op) });
    }
}

/// Vertex count `2k + 1`, or 0 for NULL.
///
/// # Safety
/// `op` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pathgap_operator_len(op: *const PathgapOperator) -> usize {
    // SAFETY: caller contract.
    unsafe { op.as_ref() }.map_or(0, |o| o.inner.len())
}

/// Number of eigenvalues strictly below `mu`.
///
/// # Safety
/// `op` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pathgap_sturm_count(op: *const PathgapOperator, mu: f64, out: *mut usize) -> PathgapStatus {
    guard(|| {
        // SAFETY: caller contract.
        let (Some(op), false) = (unsafe { op.as_ref() }, out.is_null()) else {
            return fail(PathgapStatus::NullPointer, "null argument");
        };
        unsafe { *out = sturm_count(&op.inner, mu) };
        PathgapStatus::Ok
    })
}

/// `index`-th smallest eigenvalue; `rel_tol <= 0` selects the default.
///
/// # Safety
/// `op` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pathgap_eigenvalue(
    op: *const PathgapOperator,
    index: usize,
    rel_tol: f64,
    out: *mut f64,
) -> PathgapStatus {
    guard(|| {
        // SAFETY: caller contract.
        let (Some(op), false) = (unsafe { op.as_ref() }, out.is_null()) else {
            return fail(PathgapStatus::NullPointer, "null argument");
        };
        let tol = if rel_tol > 0.0 { rel_tol } else { DEFAULT_REL_TOL };
        match eigenvalue(&op.inner, index, tol) {
            Ok(v) => {
                unsafe { *out = v };
                PathgapStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Lowest two eigenvalues and the gap.
///
/// # Safety
/// `op` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pathgap_spectrum_low(op: *const PathgapOperator, out: *mut PathgapSpectrum) -> PathgapStatus {
    guard(|| {
        // SAFETY: caller contract.
        let (Some(op), false) = (unsafe { op.as_ref() }, out.is_null()) else {
            return fail(PathgapStatus::NullPointer, "null argument");
        };
        match spectrum_low_with(&op.inner, DEFAULT_REL_TOL, default_residual_tol(&op.inner)) {
            Ok(s) => {
                unsafe {
                    *out = PathgapSpectrum {
                        lambda0: s.lambda0,
                        lambda1: s.lambda1,
                        gap: s.gap,
                        residual: s.residual,
                        precision_limited: s.precision_limited,
                    }
                };
                PathgapStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Writes the positive normalized ground state (site order `-k..=k`) into
/// `buf`, which must hold at least `pathgap_operator_len(op)` values.
///
/// # Safety
/// `op` must be a live handle and `buf` must point to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn pathgap_ground_state(op: *const PathgapOperator, buf: *mut f64, len: usize) -> PathgapStatus {
    guard(|| {
        // SAFETY: caller contract.
        let (Some(op), false) = (unsafe { op.as_ref() }, buf.is_null()) else {
            return fail(PathgapStatus::NullPointer, "null argument");
        };
        let n = op.inner.len();
        if len < n {
            return fail(PathgapStatus::BufferTooSmall, format!("need {n} entries, got {len}"));
        }
        match pathgap::ground_state(&op.inner, default_residual_tol(&op.inner)) {
            Ok(gs) => {
                // SAFETY: `buf` holds at least `n` values.
                unsafe { ptr::copy_nonoverlapping(gs.vector.as_ptr(), buf, n) };
                PathgapStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Evaluates every eigenvalue bound for the operator; `epsilon` is the
/// trial-state parameter and `k_min` the size below which the excited-state
/// sandwich is informational.
///
/// # Safety
/// `op` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pathgap_verify_bounds(
    op: *const PathgapOperator,
    epsilon: f64,
    k_min: usize,
    out: *mut PathgapBoundsSummary,
) -> PathgapStatus {
    guard(|| {
        // SAFETY: caller contract.
        let (Some(op), false) = (unsafe { op.as_ref() }, out.is_null()) else {
            return fail(PathgapStatus::NullPointer, "null argument");
        };
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return fail(PathgapStatus::InvalidArgument, "epsilon must be positive");
        }
        let potential = op.inner.potential();
        if potential.is_empty() {
            return from_error(Error::EmptyPotential);
        }
        let s = match spectrum_low_with(&op.inner, DEFAULT_REL_TOL, default_residual_tol(&op.inner)) {
            Ok(s) => s,
            Err(e) => return from_error(e),
        };
        let report = verify_all(op.inner.half_width(), potential, &s, epsilon, k_min);
        let nan = f64::NAN;
        unsafe {
            *out = PathgapBoundsSummary {
                lambda0: s.lambda0,
                lambda1: s.lambda1,
                ground_lower: report.ground_lower.unwrap_or(nan),
                ground_upper: report.ground_upper.unwrap_or(nan),
                excited_lower: report.excited_lower.unwrap_or(nan),
                excited_upper: report.excited_upper.unwrap_or(nan),
                checks_total: report.checks.len(),
                checks_applicable: report.checks.iter().filter(|c| c.is_applicable()).count(),
                checks_failed: report.failures().count(),
                all_applicable_hold: report.all_applicable_hold(),
            }
        };
        PathgapStatus::Ok
    })
}

/// `2 − 2 cos(π / (2m + 1))`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pathgap_dirichlet_ground_energy(m: usize, out: *mut f64) -> PathgapStatus {
    guard(|| {
        if out.is_null() {
            return fail(PathgapStatus::NullPointer, "null argument");
        }
        match dirichlet_ground_energy(m) {
            Ok(v) => {
                unsafe { *out = v };
                PathgapStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}
