//! C ABI over rumin-lab.
//!
//! Handles are opaque and owned by the caller once returned; release them
//! with the matching `*_free`. Every fallible call returns an [`RlStatus`];
//! the message of the last failure on the calling thread is available from
//! [`rl_last_error`].

use rumin_lab::cli::{build_setup, closed_form, numeric_torsion, truncation_for, CliError, Setup};
use rumin_lab::rumin::verify_complex;
use rumin_lab::spectral::{laplacian_spectrum_converged, rumin_seshadri_spectrum, SpectrumResult};
use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numeric = 3,
    BufferTooSmall = 4,
    Utf8 = 5,
    Panic = 6,
}

/// Algebra, metric and representation.
pub struct RlContext {
    setup: Setup,
}

/// A computed spectrum with its truncation diagnostics.
pub struct RlSpectrum {
    result: SpectrumResult,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn fail(status: RlStatus, msg: impl Into<String>) -> RlStatus {
    set_error(msg);
    status
}

fn from_cli(e: CliError) -> RlStatus {
    let status = if e.code() == rumin_lab::cli::EXIT_CONFIG { RlStatus::InvalidArgument } else { RlStatus::Numeric };
    fail(status, e.message())
}

fn guarded(f: impl FnOnce() -> RlStatus) -> RlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(RlStatus::Panic, msg)
        }
    }
}

/// # Safety
/// `p` is null or a NUL-terminated string.
unsafe fn str_or<'a>(p: *const c_char, default: &'a str) -> Result<&'a str, RlStatus> {
    if p.is_null() {
        return Ok(default);
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(RlStatus::Utf8, "argument is not valid UTF-8"))
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL.
///
/// # Safety
/// `buf` is null or points to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn rl_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = e.len().min(len - 1);
            ptr::copy_nonoverlapping(e.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        e.len()
    })
}

/// Static version string.
#[no_mangle]
pub extern "C" fn rl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Builds a context. `algebra` is "235", "heisenberg" or "abelian:n";
/// `rep` is "scalar:α₁,…", "schroedinger:ħ" or "generic:λ,μ,ν"; the metric
/// parameters are rationals such as "3/2" and default to "1" when null.
///
/// # Safety
/// String arguments are null or NUL-terminated; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn rl_context_new(
    algebra: *const c_char,
    rep: *const c_char,
    a: *const c_char,
    b11: *const c_char,
    b22: *const c_char,
    out: *mut *mut RlContext,
) -> RlStatus {
    guarded(|| {
        if out.is_null() || algebra.is_null() || rep.is_null() {
            return fail(RlStatus::NullPointer, "null argument");
        }
        *out = ptr::null_mut();
        let args = (|| Ok::<_, RlStatus>((str_or(algebra, "")?, str_or(rep, "")?, str_or(a, "1")?, str_or(b11, "1")?, str_or(b22, "1")?)))();
        let (al, rp, a, b11, b22) = match args {
            Ok(x) => x,
            Err(s) => return s,
        };
        match build_setup(al, rp, a, b11, b22) {
            Ok(setup) => {
                *out = Box::into_raw(Box::new(RlContext { setup }));
                RlStatus::Ok
            }
            Err(e) => from_cli(e),
        }
    })
}

/// # Safety
/// `ctx` is null or came from [`rl_context_new`] and was not freed.
#[no_mangle]
pub unsafe extern "C" fn rl_context_free(ctx: *mut RlContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// Number of differentials D_0 … D_{n−1}; 0 for a null handle.
///
/// # Safety
/// `ctx` is null or a live context.
#[no_mangle]
pub unsafe extern "C" fn rl_context_degree_count(ctx: *const RlContext) -> usize {
    ctx.as_ref().map_or(0, |c| c.setup.complex.d.len())
}

/// Exact check of D_{q+1}D_q = 0; `passed` receives 1 or 0.
///
/// # Safety
/// `ctx` is a live context, `passed` is writable.
#[no_mangle]
pub unsafe extern "C" fn rl_context_verify(ctx: *const RlContext, passed: *mut i32) -> RlStatus {
    guarded(|| {
        let (Some(c), false) = (ctx.as_ref(), passed.is_null()) else {
            return fail(RlStatus::NullPointer, "null argument");
        };
        let cx = &c.setup.complex;
        *passed = i32::from(verify_complex(&cx.env, &cx.d).passed());
        RlStatus::Ok
    })
}

unsafe fn write_report(log_dets: &[f64], log_torsion: f64, out: *mut f64, len: usize, tau: *mut f64) -> RlStatus {
    if tau.is_null() || (out.is_null() && len > 0) {
        return fail(RlStatus::NullPointer, "null output");
    }
    if len < log_dets.len() {
        return fail(RlStatus::BufferTooSmall, format!("need {} entries", log_dets.len()));
    }
    if !out.is_null() {
        ptr::copy_nonoverlapping(log_dets.as_ptr(), out, log_dets.len());
    }
    *tau = log_torsion;
    RlStatus::Ok
}

/// Closed-form log det|D_q| for every q into `log_dets` (at least
/// [`rl_context_degree_count`] entries) and log τ into `log_torsion`.
///
/// # Safety
/// `ctx` is a live context; `log_dets` has `len` writable entries;
/// `log_torsion` is writable.
#[no_mangle]
pub unsafe extern "C" fn rl_closed_form(ctx: *const RlContext, log_dets: *mut f64, len: usize, log_torsion: *mut f64) -> RlStatus {
    guarded(|| {
        let Some(c) = ctx.as_ref() else {
            return fail(RlStatus::NullPointer, "null context");
        };
        match closed_form(&c.setup) {
            Ok(r) => write_report(&r.log_dets, r.log_torsion, log_dets, len, log_torsion),
            Err(e) => from_cli(e),
        }
    })
}

/// Numeric log det|D_q| and log τ from truncated spectra with `n` modes;
/// `guard` 0 selects the recommended guard band.
///
/// # Safety
/// As for [`rl_closed_form`].
#[no_mangle]
pub unsafe extern "C" fn rl_numeric_torsion(
    ctx: *const RlContext,
    n: usize,
    guard: usize,
    log_dets: *mut f64,
    len: usize,
    log_torsion: *mut f64,
) -> RlStatus {
    guarded(|| {
        let Some(c) = ctx.as_ref() else {
            return fail(RlStatus::NullPointer, "null context");
        };
        match numeric_torsion(&c.setup, n, (guard > 0).then_some(guard), 1e-9) {
            Ok(r) => write_report(&r.log_dets, r.log_torsion, log_dets, len, log_torsion),
            Err(e) => from_cli(e),
        }
    })
}

/// Spectrum of D_q^{*h}D_q, or of the Rumin–Seshadri Laplacian
/// Δ_{h,q} when `laplacian` is nonzero, with `n` modes.
///
/// # Safety
/// `ctx` is a live context; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn rl_spectrum_new(
    ctx: *const RlContext,
    q: usize,
    n: usize,
    guard: usize,
    laplacian: i32,
    out: *mut *mut RlSpectrum,
) -> RlStatus {
    guarded(|| {
        let (Some(c), false) = (ctx.as_ref(), out.is_null()) else {
            return fail(RlStatus::NullPointer, "null argument");
        };
        *out = ptr::null_mut();
        let s = &c.setup;
        let top = s.complex.d.len() + usize::from(laplacian != 0);
        if q >= top {
            return fail(RlStatus::InvalidArgument, format!("degree {q} out of range"));
        }
        let trunc = match truncation_for(s, n, (guard > 0).then_some(guard)) {
            Ok(t) => t,
            Err(e) => return from_cli(e),
        };
        let r = if laplacian != 0 {
            rumin_seshadri_spectrum(&s.complex, &s.rep.spec, &s.h, q, &trunc, Some(1e-9))
        } else {
            laplacian_spectrum_converged(&s.complex, &s.rep.spec, &s.h, q, &trunc, Some(1e-9))
        };
        match r {
            Ok(result) => {
                *out = Box::into_raw(Box::new(RlSpectrum { result }));
                RlStatus::Ok
            }
            Err(e) => from_cli(e.into()),
        }
    })
}

/// # Safety
/// `s` is null or came from [`rl_spectrum_new`] and was not freed.
#[no_mangle]
pub unsafe extern "C" fn rl_spectrum_free(s: *mut RlSpectrum) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` is null or a live spectrum.
#[no_mangle]
pub unsafe extern "C" fn rl_spectrum_len(s: *const RlSpectrum) -> usize {
    s.as_ref().map_or(0, |s| s.result.eigenvalues.len())
}

/// Number of leading eigenvalues classified as kernel.
///
/// # Safety
/// `s` is null or a live spectrum.
#[no_mangle]
pub unsafe extern "C" fn rl_spectrum_kernel_count(s: *const RlSpectrum) -> usize {
    s.as_ref().map_or(0, |s| s.result.kernel_count)
}

/// Number of leading eigenvalues inside the trust window.
///
/// # Safety
/// `s` is null or a live spectrum.
#[no_mangle]
pub unsafe extern "C" fn rl_spectrum_trust_count(s: *const RlSpectrum) -> usize {
    s.as_ref().map_or(0, |s| s.result.trust_count)
}

/// Kernel threshold that was applied.
///
/// # Safety
/// `s` is null or a live spectrum.
#[no_mangle]
pub unsafe extern "C" fn rl_spectrum_kernel_threshold(s: *const RlSpectrum) -> f64 {
    s.as_ref().map_or(f64::NAN, |s| s.result.kernel_threshold)
}

/// Copies the ascending eigenvalues into `buf`.
///
/// # Safety
/// `s` is a live spectrum; `buf` has `len` writable entries.
#[no_mangle]
pub unsafe extern "C" fn rl_spectrum_copy(s: *const RlSpectrum, buf: *mut f64, len: usize) -> RlStatus {
    guarded(|| {
        let (Some(s), false) = (s.as_ref(), buf.is_null()) else {
            return fail(RlStatus::NullPointer, "null argument");
        };
        let e = &s.result.eigenvalues;
        if len < e.len() {
            return fail(RlStatus::BufferTooSmall, format!("need {} entries", e.len()));
        }
        ptr::copy_nonoverlapping(e.as_ptr(), buf, e.len());
        RlStatus::Ok
    })
}
