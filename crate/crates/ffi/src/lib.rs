//! C ABI over `berger-helix`.
//!
//! Surfaces are opaque `BhSurface` handles owned by the caller and released
//! with `bh_surface_free`. Every fallible function returns a `BhStatus`; on
//! failure `bh_last_error` describes the most recent error of the calling
//! thread. Strings returned by the library are released with `bh_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use berger_helix::helix::compute_constants;
use berger_helix::io::RunConfig;
use berger_helix::verify::{run_all, VerifyConfig};
use berger_helix::{BergerParams, Error, HelixSurface, OrthoFamily, XiProfile};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BhStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutOfDomain = 3,
    Degenerate = 4,
    VerificationFailed = 5,
    Panic = 6,
}

/// Opaque surface handle.
pub struct BhSurface {
    inner: HelixSurface,
}

/// Closed-form constants of a parameter pair.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BhConstants {
    pub b: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub g11: f64,
    pub g33: f64,
    pub c1: f64,
    pub c2: f64,
    pub a_tilde: f64,
    pub b_tilde: f64,
    pub d: f64,
    pub e: f64,
    pub i: f64,
    pub gauss_k: f64,
    pub slope: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<Vec<u8>>) {
    let msg = CString::new(msg).unwrap_or_else(|_| CString::new("error message contained NUL").expect("literal"));
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> BhStatus {
    match e {
        Error::OutOfDomain { .. } | Error::AtPole | Error::NearPole { .. } => BhStatus::OutOfDomain,
        Error::DegenerateTangentPlane { .. } | Error::SingularMetric(_) | Error::DegenerateXi1 { .. } => {
            BhStatus::Degenerate
        }
        _ => BhStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (BhStatus, String)>) -> BhStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            BhStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside berger-helix");
            BhStatus::Panic
        }
    }
}

fn lift(e: Error) -> (BhStatus, String) {
    (status_of(&e), e.to_string())
}

fn null() -> (BhStatus, String) {
    (BhStatus::NullPointer, "null pointer argument".to_string())
}

/// Message of the last failure on this thread; empty after a success.
/// Valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn bh_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Fills `out` with the constants of (epsilon, theta).
///
/// # Safety
/// `out` must be null or point to writable `BhConstants`.
#[no_mangle]
pub unsafe extern "C" fn bh_constants(epsilon: f64, theta: f64, out: *mut BhConstants) -> BhStatus {
    guard(|| {
        let out = unsafe { out.as_mut() }.ok_or_else(null)?;
        let k = compute_constants(&BergerParams::new(epsilon, theta).map_err(lift)?);
        *out = BhConstants {
            b: k.b,
            alpha1: k.alpha1,
            alpha2: k.alpha2,
            g11: k.g11,
            g33: k.g33,
            c1: k.c1,
            c2: k.c2,
            a_tilde: k.a_tilde,
            b_tilde: k.b_tilde,
            d: k.d_const,
            e: k.e_const,
            i: k.i_const,
            gauss_k: k.gauss_k,
            slope: k.slope,
        };
        Ok(())
    })
}

fn store(out: *mut *mut BhSurface, inner: HelixSurface) -> Result<(), (BhStatus, String)> {
    let slot = unsafe { out.as_mut() }.ok_or_else(null)?;
    *slot = Box::into_raw(Box::new(BhSurface { inner }));
    Ok(())
}

/// Surface of the profile ξ = π/2, ξ1 = π/4, ξ2 = ξ3 = v on `[v_min, v_max]`.
///
/// # Safety
/// `out` must be null or point to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn bh_surface_new_example(
    epsilon: f64,
    theta: f64,
    v_min: f64,
    v_max: f64,
    out: *mut *mut BhSurface,
) -> BhStatus {
    guard(|| {
        let params = BergerParams::new(epsilon, theta).map_err(lift)?;
        let profile = XiProfile::example(v_min, v_max).map_err(lift)?;
        store(out, HelixSurface::new(params, OrthoFamily::new(profile)))
    })
}

/// Surface described by a JSON run configuration.
///
/// # Safety
/// `config_json` must be null or a NUL-terminated string; `out` as above.
#[no_mangle]
pub unsafe extern "C" fn bh_surface_from_json(config_json: *const c_char, out: *mut *mut BhSurface) -> BhStatus {
    guard(|| {
        if config_json.is_null() {
            return Err(null());
        }
        let text = unsafe { CStr::from_ptr(config_json) }
            .to_str()
            .map_err(|e| (BhStatus::InvalidArgument, e.to_string()))?;
        let cfg = RunConfig::from_json(text).map_err(lift)?;
        cfg.validate().map_err(lift)?;
        store(out, cfg.surface().map_err(lift)?)
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `surface` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bh_surface_free(surface: *mut BhSurface) {
    if !surface.is_null() {
        drop(unsafe { Box::from_raw(surface) });
    }
}

fn with_surface<'a>(surface: *const BhSurface) -> Result<&'a HelixSurface, (BhStatus, String)> {
    unsafe { surface.as_ref() }.map(|s| &s.inner).ok_or_else(null)
}

/// Writes `F(u,v)` as `(x1, y1, x2, y2)` to `out[0..4]`.
///
/// # Safety
/// `surface` must be a live handle; `out` must hold 4 doubles.
#[no_mangle]
pub unsafe extern "C" fn bh_surface_position(surface: *const BhSurface, u: f64, v: f64, out: *mut f64) -> BhStatus {
    guard(|| {
        let s = with_surface(surface)?;
        if out.is_null() {
            return Err(null());
        }
        let p = s.position(u, v).map_err(lift)?.to_array();
        unsafe { ptr::copy_nonoverlapping(p.as_ptr(), out, 4) };
        Ok(())
    })
}

/// Writes the unnormalized frame components `(N1, N2, N3)` to `out[0..3]`.
///
/// # Safety
/// `surface` must be a live handle; `out` must hold 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn bh_surface_normal(surface: *const BhSurface, u: f64, v: f64, out: *mut f64) -> BhStatus {
    guard(|| {
        let s = with_surface(surface)?;
        if out.is_null() {
            return Err(null());
        }
        let n = s.normal_components(u, v).map_err(lift)?;
        unsafe { ptr::copy_nonoverlapping(n.as_ptr(), out, 3) };
        Ok(())
    })
}

/// Writes the angle between the normal and the Hopf field to `out`.
///
/// # Safety
/// `surface` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bh_surface_angle(surface: *const BhSurface, u: f64, v: f64, out: *mut f64) -> BhStatus {
    guard(|| {
        let s = with_surface(surface)?;
        let out = unsafe { out.as_mut() }.ok_or_else(null)?;
        *out = s.measured_angle(u, v).map_err(lift)?;
        Ok(())
    })
}

/// Runs the full verification with default settings. The JSON report is
/// stored in `*report_json` (free with `bh_string_free`). Returns
/// `VerificationFailed` when any check fails; the report is still produced.
///
/// # Safety
/// `surface` must be a live handle; `report_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bh_surface_verify(surface: *const BhSurface, report_json: *mut *mut c_char) -> BhStatus {
    guard(|| {
        let s = with_surface(surface)?;
        let slot = unsafe { report_json.as_mut() }.ok_or_else(null)?;
        let report = run_all(s, &VerifyConfig::default());
        let text = CString::new(report.to_json()).map_err(|e| (BhStatus::Panic, e.to_string()))?;
        *slot = text.into_raw();
        if report.overall_pass {
            Ok(())
        } else {
            Err((BhStatus::VerificationFailed, format!("failing checks: {}", report.failing().join(", "))))
        }
    })
}

/// Releases a string returned by the library; null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bh_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
