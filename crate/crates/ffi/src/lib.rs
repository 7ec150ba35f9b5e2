//! C interface to `rzl-core`.
//!
//! Every fallible function returns an [`RzlStatus`]. On failure the message is
//! kept per thread and can be read with [`rzl_last_error`]. Handles are opaque
//! and owned by the caller once returned; release them with the matching
//! `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use num_complex::Complex64;
use rzl_core::geometry::{beta, geometry_jet, BoundaryPoint, GeometryJet, RadialProfile};
use rzl_core::kacrice::{density_n, pair_n};
use rzl_core::limits::{density_limit, eval_f, log_f_dd, pair_limit, LimitGeometry};
use rzl_core::montecarlo::find_roots;
use rzl_core::szego::{compute_norms, scaled_ratio, NormTable};
use rzl_core::{Error, ErrorClass};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RzlComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for RzlComplex {
    fn from(c: Complex64) -> Self {
        Self { re: c.re, im: c.im }
    }
}

impl From<RzlComplex> for Complex64 {
    fn from(c: RzlComplex) -> Self {
        Complex64::new(c.re, c.im)
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RzlStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Bad arguments or violated preconditions.
    Precondition = 2,
    /// Accuracy, conditioning or root-quality failure.
    Numerical = 3,
    Io = 4,
    /// The output buffer is too small; the required size is still reported.
    BufferTooSmall = 5,
    /// A Rust panic was caught at the boundary.
    Panic = 6,
}

/// Boundary profile handle.
pub struct RzlProfile(RadialProfile);

/// Norm table handle.
pub struct RzlNormTable(NormTable);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(e: Error) -> RzlStatus {
    let status = match e.class() {
        ErrorClass::Precondition => RzlStatus::Precondition,
        ErrorClass::Numerical => RzlStatus::Numerical,
        ErrorClass::Io => RzlStatus::Io,
    };
    set_error(e.to_string());
    status
}

fn null(what: &str) -> RzlStatus {
    set_error(format!("null pointer: {what}"));
    RzlStatus::NullPointer
}

fn guard<F: FnOnce() -> RzlStatus>(f: F) -> RzlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            RzlStatus::Panic
        }
    }
}

unsafe fn complex_slice(p: *const RzlComplex, len: usize) -> Vec<Complex64> {
    if len == 0 {
        return Vec::new();
    }
    std::slice::from_raw_parts(p, len).iter().map(|&c| c.into()).collect()
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, RzlStatus> {
    if p.is_null() {
        return Err(null("string argument"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8".into());
        RzlStatus::Precondition
    })
}

fn jet_for(profile: &RadialProfile, z: &[Complex64]) -> Result<GeometryJet, Error> {
    geometry_jet(profile, &BoundaryPoint::new(profile, z)?)
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rzl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// `F_m(t) = ∫₀¹ e^{ty} yᵐ dy`.
///
/// # Safety
/// `out` must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rzl_eval_f(m: usize, t: RzlComplex, out: *mut RzlComplex) -> RzlStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        match eval_f(m, t.into()) {
            Ok(v) => {
                *out = v.into();
                RzlStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// `(log F_m)″(s)`.
///
/// # Safety
/// `out` must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rzl_log_f_dd(m: usize, s: RzlComplex, out: *mut RzlComplex) -> RzlStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        match log_f_dd(m, s.into()) {
            Ok(v) => {
                *out = v.into();
                RzlStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Limit density `D^∞` for boundary data `(m, t0, ‖P‖², β(P))` at `β(u)`.
///
/// # Safety
/// `out` must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rzl_density_limit(
    m: usize,
    t0: RzlComplex,
    p_norm_sq: f64,
    beta_of_p: RzlComplex,
    beta_u: RzlComplex,
    out: *mut f64,
) -> RzlStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        let r = LimitGeometry::new(m, t0.into(), p_norm_sq, beta_of_p.into())
            .and_then(|g| density_limit(&g, beta_u.into()));
        match r {
            Ok(v) => {
                *out = v;
                RzlStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Limit pair correlation `K^∞` and its normalized form `K̃^∞`.
///
/// # Safety
/// `k_inf` and `k_tilde_inf` must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rzl_pair_limit(
    m: usize,
    t0: RzlComplex,
    p_norm_sq: f64,
    beta_of_p: RzlComplex,
    beta_u: RzlComplex,
    k_inf: *mut f64,
    k_tilde_inf: *mut f64,
) -> RzlStatus {
    guard(|| {
        if k_inf.is_null() || k_tilde_inf.is_null() {
            return null("k_inf / k_tilde_inf");
        }
        let r = LimitGeometry::new(m, t0.into(), p_norm_sq, beta_of_p.into())
            .and_then(|g| pair_limit(&g, beta_u.into()));
        match r {
            Ok(p) => {
                *k_inf = p.k_inf;
                *k_tilde_inf = p.k_tilde_inf;
                RzlStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Parses `circle`, `sphere[:dim]`, `ellipsoid:a0,a1,...` or
/// `pellipsoid:p0,p1,...`.
///
/// # Safety
/// `spec` must be null or a NUL-terminated string; `out` must be null or
/// valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rzl_profile_parse(spec: *const c_char, out: *mut *mut RzlProfile) -> RzlStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        let s = match str_arg(spec) {
            Ok(s) => s,
            Err(st) => return st,
        };
        match RadialProfile::parse(s) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(RzlProfile(p)));
                RzlStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Number of complex coordinates, or 0 for a null handle.
///
/// # Safety
/// `profile` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rzl_profile_dim(profile: *const RzlProfile) -> usize {
    profile.as_ref().map_or(0, |p| p.0.dim())
}

/// # Safety
/// `profile` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rzl_profile_free(profile: *mut RzlProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

/// `β(u)` at the boundary point `z`.
///
/// # Safety
/// `z` and `u` must point to `dim` values; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rzl_beta(
    profile: *const RzlProfile,
    z: *const RzlComplex,
    u: *const RzlComplex,
    dim: usize,
    out: *mut RzlComplex,
) -> RzlStatus {
    guard(|| {
        let Some(p) = profile.as_ref() else { return null("profile") };
        if z.is_null() || u.is_null() || out.is_null() {
            return null("z / u / out");
        }
        match jet_for(&p.0, &complex_slice(z, dim)) {
            Ok(jet) => {
                let uv = complex_slice(u, dim);
                if uv.len() != jet.d_rho.len() {
                    return fail(Error::InvalidInput("u has the wrong dimension".into()));
                }
                *out = beta(&jet, &uv).into();
                RzlStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Norm table of degree `n` for the profile's boundary measure.
///
/// # Safety
/// `profile` must be null or a live handle; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rzl_norms_compute(
    profile: *const RzlProfile,
    n: usize,
    quad_order: usize,
    out: *mut *mut RzlNormTable,
) -> RzlStatus {
    guard(|| {
        let Some(p) = profile.as_ref() else { return null("profile") };
        if out.is_null() {
            return null("out");
        }
        match compute_norms(&p.0, n, quad_order) {
            Ok(t) => {
                *out = Box::into_raw(Box::new(RzlNormTable(t)));
                RzlStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `path` must be a NUL-terminated string; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rzl_norms_load(path: *const c_char, out: *mut *mut RzlNormTable) -> RzlStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        let s = match str_arg(path) {
            Ok(s) => s,
            Err(st) => return st,
        };
        match NormTable::load(Path::new(s)) {
            Ok(t) => {
                *out = Box::into_raw(Box::new(RzlNormTable(t)));
                RzlStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `table` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn rzl_norms_save(table: *const RzlNormTable, path: *const c_char) -> RzlStatus {
    guard(|| {
        let Some(t) = table.as_ref() else { return null("table") };
        let s = match str_arg(path) {
            Ok(s) => s,
            Err(st) => return st,
        };
        match t.0.save(Path::new(s)) {
            Ok(()) => RzlStatus::Ok,
            Err(e) => fail(e),
        }
    })
}

/// Number of multi-indices in the table, or 0 for a null handle.
///
/// # Safety
/// `table` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rzl_norms_len(table: *const RzlNormTable) -> usize {
    table.as_ref().map_or(0, |t| t.0.len())
}

/// Top degree of the table, or 0 for a null handle.
///
/// # Safety
/// `table` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rzl_norms_degree(table: *const RzlNormTable) -> usize {
    table.as_ref().map_or(0, |t| t.0.degree())
}

/// # Safety
/// `table` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rzl_norms_free(table: *mut RzlNormTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Finite-degree zero density `D_N(z + u/N)`.
///
/// # Safety
/// `z` and `u` must point to `dim` values; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rzl_density_n(
    table: *const RzlNormTable,
    z: *const RzlComplex,
    u: *const RzlComplex,
    dim: usize,
    n: usize,
    out: *mut f64,
) -> RzlStatus {
    guard(|| {
        let Some(t) = table.as_ref() else { return null("table") };
        if z.is_null() || u.is_null() || out.is_null() {
            return null("z / u / out");
        }
        match density_n(&t.0, &complex_slice(z, dim), &complex_slice(u, dim), n) {
            Ok(v) => {
                *out = v;
                RzlStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Finite-degree pair correlation between `z + u/N` and `z`.
///
/// # Safety
/// `z` and `u` must point to `dim` values; `k_n` and `k_tilde_n` must be
/// valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rzl_pair_n(
    profile: *const RzlProfile,
    table: *const RzlNormTable,
    z: *const RzlComplex,
    u: *const RzlComplex,
    dim: usize,
    n: usize,
    k_n: *mut f64,
    k_tilde_n: *mut f64,
) -> RzlStatus {
    guard(|| {
        let Some(p) = profile.as_ref() else { return null("profile") };
        let Some(t) = table.as_ref() else { return null("table") };
        if z.is_null() || u.is_null() || k_n.is_null() || k_tilde_n.is_null() {
            return null("z / u / k_n / k_tilde_n");
        }
        let (zv, uv) = (complex_slice(z, dim), complex_slice(u, dim));
        match jet_for(&p.0, &zv).and_then(|jet| pair_n(&t.0, &jet, &zv, &uv, n)) {
            Ok(r) => {
                *k_n = r.k_n;
                *k_tilde_n = r.k_tilde_n;
                RzlStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// `S_N(z + u/N, z + v/N) / S_N(z, z)`.
///
/// # Safety
/// `z`, `u`, `v` must point to `dim` values; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rzl_scaled_ratio(
    table: *const RzlNormTable,
    z: *const RzlComplex,
    u: *const RzlComplex,
    v: *const RzlComplex,
    dim: usize,
    n: usize,
    out: *mut RzlComplex,
) -> RzlStatus {
    guard(|| {
        let Some(t) = table.as_ref() else { return null("table") };
        if z.is_null() || u.is_null() || v.is_null() || out.is_null() {
            return null("z / u / v / out");
        }
        let r = scaled_ratio(&t.0, &complex_slice(z, dim), &complex_slice(u, dim), &complex_slice(v, dim), n);
        match r {
            Ok(c) => {
                *out = c.into();
                RzlStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Roots of `Σ coeffs[k] xᵏ`. `*count` receives the number of roots; if it
/// exceeds `capacity` nothing is written to `roots` and
/// [`RzlStatus::BufferTooSmall`] is returned.
///
/// # Safety
/// `coeffs` must point to `len` values, `roots` to `capacity` writable
/// values (or be null when `capacity` is 0), `count` must be valid for one
/// write.
#[no_mangle]
pub unsafe extern "C" fn rzl_find_roots(
    coeffs: *const RzlComplex,
    len: usize,
    roots: *mut RzlComplex,
    capacity: usize,
    count: *mut usize,
) -> RzlStatus {
    guard(|| {
        if (coeffs.is_null() && len > 0) || count.is_null() || (roots.is_null() && capacity > 0) {
            return null("coeffs / roots / count");
        }
        match find_roots(&complex_slice(coeffs, len)) {
            Ok(r) => {
                *count = r.len();
                if r.len() > capacity {
                    set_error(format!("need room for {} roots, got {capacity}", r.len()));
                    return RzlStatus::BufferTooSmall;
                }
                for (k, v) in r.into_iter().enumerate() {
                    *roots.add(k) = v.into();
                }
                RzlStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}
