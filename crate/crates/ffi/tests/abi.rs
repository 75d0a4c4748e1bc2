use std::ffi::{CStr, CString};
use std::f64::consts::{FRAC_PI_4, TAU};
use std::ptr;

use berger_helix_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(bh_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn constants_round_trip() {
    let mut k = BhConstants::default();
    assert_eq!(unsafe { bh_constants(1.0, FRAC_PI_4, &mut k) }, BhStatus::Ok);
    assert_eq!(k.b, 1.0);
    assert!((k.g11 - 0.14644660940672624).abs() < 1e-15);
    assert!((k.i + 0.75).abs() < 1e-15);
    assert!(last_error().is_empty());

    assert_eq!(unsafe { bh_constants(1.0, 2.0, &mut k) }, BhStatus::InvalidArgument);
    assert!(last_error().contains("Hopf-tube"));
    assert_eq!(unsafe { bh_constants(1.0, 0.5, ptr::null_mut()) }, BhStatus::NullPointer);
}

#[test]
fn surface_handle_lifecycle() {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { bh_surface_new_example(1.0, FRAC_PI_4, 0.0, TAU, &mut s) }, BhStatus::Ok);
    assert!(!s.is_null());

    let mut p = [0.0; 4];
    assert_eq!(unsafe { bh_surface_position(s, 0.5, 1.0, p.as_mut_ptr()) }, BhStatus::Ok);
    assert!((p.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);

    let mut angle = 0.0;
    assert_eq!(unsafe { bh_surface_angle(s, 0.5, 1.0, &mut angle) }, BhStatus::Ok);
    assert!((angle - FRAC_PI_4).abs() < 1e-8);

    // u = 0 lies on a singular line of this surface.
    let mut n = [0.0; 3];
    assert_eq!(unsafe { bh_surface_normal(s, 0.0, 1.0, n.as_mut_ptr()) }, BhStatus::Degenerate);
    assert_eq!(unsafe { bh_surface_position(s, 0.5, 9.0, p.as_mut_ptr()) }, BhStatus::OutOfDomain);

    let mut report = ptr::null_mut();
    assert_eq!(unsafe { bh_surface_verify(s, &mut report) }, BhStatus::Ok);
    let json = unsafe { CStr::from_ptr(report) }.to_str().unwrap().to_owned();
    assert!(json.contains("\"overall_pass\": true"));
    unsafe { bh_string_free(report) };
    unsafe { bh_surface_free(s) };
    unsafe { bh_surface_free(ptr::null_mut()) };
}

#[test]
fn surface_from_json() {
    let cfg = CString::new(r#"{"epsilon": 0.5, "theta": 1.0}"#).unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { bh_surface_from_json(cfg.as_ptr(), &mut s) }, BhStatus::Ok);
    let mut angle = 0.0;
    assert_eq!(unsafe { bh_surface_angle(s, 1.0, 2.0, &mut angle) }, BhStatus::Ok);
    assert!((angle - 1.0).abs() < 1e-8);
    unsafe { bh_surface_free(s) };

    let bad = CString::new(r#"{"epsilon": -1}"#).unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { bh_surface_from_json(bad.as_ptr(), &mut s) }, BhStatus::InvalidArgument);
    assert!(s.is_null());
    assert_eq!(unsafe { bh_surface_from_json(ptr::null(), &mut s) }, BhStatus::NullPointer);
}

#[test]
fn null_handles_are_rejected() {
    let mut angle = 0.0;
    assert_eq!(unsafe { bh_surface_angle(ptr::null(), 0.0, 0.0, &mut angle) }, BhStatus::NullPointer);
    let mut report = ptr::null_mut();
    assert_eq!(unsafe { bh_surface_verify(ptr::null(), &mut report) }, BhStatus::NullPointer);
}

#[test]
fn header_is_valid_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/berger_helix.h");
    let text = std::fs::read_to_string(header).expect("header generated by build script");
    for name in ["bh_constants", "bh_surface_new_example", "bh_surface_free", "bh_last_error", "BH_STATUS_OK"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    // Compile-check the header when a C compiler is present.
    let Ok(out) = std::process::Command::new("cc").args(["-fsyntax-only", "-x", "c", header]).output() else {
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
