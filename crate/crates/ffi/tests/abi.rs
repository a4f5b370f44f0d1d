use rumin_lab_ffi::*;
use std::ffi::{c_char, CString};
use std::ptr;

fn cs(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 256];
    let n = unsafe { rl_last_error(buf.as_mut_ptr(), buf.len()) };
    let bytes: Vec<u8> = buf[..n.min(255)].iter().map(|&c| c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

fn context(algebra: &str, rep: &str, a: Option<&str>) -> *mut RlContext {
    let (al, rp) = (cs(algebra), cs(rep));
    let a = a.map(cs);
    let mut ctx = ptr::null_mut();
    let st = unsafe { rl_context_new(al.as_ptr(), rp.as_ptr(), a.as_ref().map_or(ptr::null(), |s| s.as_ptr()), ptr::null(), ptr::null(), &mut ctx) };
    assert_eq!(st, RlStatus::Ok, "{}", last_error());
    assert!(!ctx.is_null());
    ctx
}

#[test]
fn closed_form_scalar_torsion() {
    let ctx = context("235", "scalar:1,0", None);
    unsafe {
        assert_eq!(rl_context_degree_count(ctx), 5);
        let mut passed = 0;
        assert_eq!(rl_context_verify(ctx, &mut passed), RlStatus::Ok);
        assert_eq!(passed, 1);
        let mut dets = [0.0; 5];
        let mut tau = 0.0;
        assert_eq!(rl_closed_form(ctx, dets.as_mut_ptr(), 5, &mut tau), RlStatus::Ok);
        assert!((tau - 0.5f64.ln()).abs() < 1e-12);
        assert!((dets[2] - 0.5f64.ln()).abs() < 1e-12);
        assert_eq!(rl_closed_form(ctx, dets.as_mut_ptr(), 4, &mut tau), RlStatus::BufferTooSmall);
        assert!(last_error().contains('5'));
        rl_context_free(ctx);
    }
}

#[test]
fn heisenberg_metric_argument() {
    let ctx = context("heisenberg", "scalar:1,0", Some("4"));
    let mut dets = [0.0; 3];
    let mut tau = 0.0;
    unsafe {
        assert_eq!(rl_closed_form(ctx, dets.as_mut_ptr(), 3, &mut tau), RlStatus::Ok);
        rl_context_free(ctx);
    }
    assert!((tau - 2f64.ln()).abs() < 1e-12);
}

#[test]
fn oscillator_spectrum() {
    let ctx = context("235", "schroedinger:1", None);
    unsafe {
        let mut sp = ptr::null_mut();
        assert_eq!(rl_spectrum_new(ctx, 0, 60, 0, 0, &mut sp), RlStatus::Ok, "{}", last_error());
        let n = rl_spectrum_len(sp);
        assert!(n > 0 && rl_spectrum_trust_count(sp) <= n);
        assert_eq!(rl_spectrum_kernel_count(sp), 0);
        assert!(rl_spectrum_kernel_threshold(sp) > 0.0);
        let mut buf = vec![0.0; n];
        assert_eq!(rl_spectrum_copy(sp, buf.as_mut_ptr(), n), RlStatus::Ok);
        for (k, e) in buf.iter().take(10).enumerate() {
            assert!((e - (2 * k + 1) as f64).abs() < 1e-9, "{k} {e}");
        }
        assert_eq!(rl_spectrum_copy(sp, buf.as_mut_ptr(), n - 1), RlStatus::BufferTooSmall);
        rl_spectrum_free(sp);
        let mut sp = ptr::null_mut();
        assert_eq!(rl_spectrum_new(ctx, 5, 60, 0, 0, &mut sp), RlStatus::InvalidArgument);
        assert!(sp.is_null());
        rl_context_free(ctx);
    }
}

#[test]
fn numeric_schroedinger_torsion() {
    let ctx = context("235", "schroedinger:1", None);
    let mut dets = [0.0; 5];
    let mut tau = 1.0;
    unsafe {
        assert_eq!(rl_numeric_torsion(ctx, 200, 0, dets.as_mut_ptr(), 5, &mut tau), RlStatus::Ok, "{}", last_error());
        rl_context_free(ctx);
    }
    assert!(tau.abs() < 1e-6, "{tau}");
    assert!((dets[0] - 0.25 * 2f64.ln()).abs() < 1e-6);
}

#[test]
fn errors_are_reported() {
    let (al, rp) = (cs("nope"), cs("schroedinger:1"));
    let mut ctx = ptr::null_mut();
    unsafe {
        assert_eq!(rl_context_new(al.as_ptr(), rp.as_ptr(), ptr::null(), ptr::null(), ptr::null(), &mut ctx), RlStatus::InvalidArgument);
        assert!(ctx.is_null());
        assert!(last_error().contains("nope"));
        assert_eq!(rl_context_new(ptr::null(), rp.as_ptr(), ptr::null(), ptr::null(), ptr::null(), &mut ctx), RlStatus::NullPointer);
        let bad = [0xffu8 as c_char, 0];
        assert_eq!(rl_context_new(bad.as_ptr(), rp.as_ptr(), ptr::null(), ptr::null(), ptr::null(), &mut ctx), RlStatus::Utf8);
        let mut passed = 0;
        assert_eq!(rl_context_verify(ptr::null(), &mut passed), RlStatus::NullPointer);
        assert_eq!(rl_context_degree_count(ptr::null()), 0);
        rl_context_free(ptr::null_mut());
        rl_spectrum_free(ptr::null_mut());
    }
    let ctx = context("235", "scalar:1,0", None);
    let mut dets = [0.0; 5];
    let mut tau = 0.0;
    unsafe {
        assert_eq!(rl_numeric_torsion(ctx, 100, 0, dets.as_mut_ptr(), 5, &mut tau), RlStatus::InvalidArgument);
        rl_context_free(ctx);
    }
}

#[test]
fn header_matches_exports() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/rumin_lab.h")).unwrap();
    for f in [
        "rl_last_error",
        "rl_version",
        "rl_context_new",
        "rl_context_free",
        "rl_context_degree_count",
        "rl_context_verify",
        "rl_closed_form",
        "rl_numeric_torsion",
        "rl_spectrum_new",
        "rl_spectrum_free",
        "rl_spectrum_len",
        "rl_spectrum_kernel_count",
        "rl_spectrum_trust_count",
        "rl_spectrum_kernel_threshold",
        "rl_spectrum_copy",
    ] {
        assert!(header.contains(&format!("{f}(")), "{f}");
    }
    assert!(header.contains("typedef struct RlContext RlContext;"));
    let v = unsafe { std::ffi::CStr::from_ptr(rl_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/rumin_lab.h");
    match std::process::Command::new("cc").args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c", header]).output() {
        Ok(out) => assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr)),
        Err(_) => eprintln!("no C compiler; skipped"),
    }
}
