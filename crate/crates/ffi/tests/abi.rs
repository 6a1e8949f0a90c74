use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use ccr_krein_ffi::*;

#[test]
fn schroedinger_rep_round_trip() {
    unsafe {
        let mut rep = ptr::null_mut();
        assert_eq!(ccr_rep_schroedinger(-0.5, 1.0, 8, 1, &mut rep), CcrStatus::Ok);
        assert_eq!(ccr_rep_dim(rep), 9);
        let mut gram = [0.0; 9];
        assert_eq!(ccr_rep_gram(rep, gram.as_mut_ptr(), 9), CcrStatus::Ok);
        assert!((gram[0] - std::f64::consts::PI.sqrt()).abs() < 1e-14);
        assert_eq!(ccr_rep_gram(rep, gram.as_mut_ptr(), 3), CcrStatus::BufferTooSmall);
        let mut report = CcrRepReport::default();
        assert_eq!(ccr_rep_verify(rep, 20, &mut report), CcrStatus::Ok);
        assert!(report.star_property_max_residual < 1e-10);
        assert!(report.gauge_covariance_exact);
        ccr_rep_free(rep);
    }
}

#[test]
fn errors_map_to_codes_and_messages() {
    unsafe {
        let mut rep = ptr::null_mut();
        assert_eq!(ccr_rep_schroedinger(0.5, 1.0, 4, 1, &mut rep), CcrStatus::DomainError);
        assert!(rep.is_null());
        let mut buf = [0 as std::ffi::c_char; 256];
        let n = ccr_last_error_message(buf.as_mut_ptr(), buf.len());
        assert!(n > 0);
        let msg = CStr::from_ptr(buf.as_ptr()).to_str().unwrap();
        assert!(msg.contains("theta"), "{msg}");
        assert_eq!(ccr_rep_schroedinger(-0.5, 1.0, 4, 2, &mut rep), CcrStatus::InvalidInput);
        assert_eq!(ccr_rep_fock(3, ptr::null_mut()), CcrStatus::NullPointer);
        let mut s = ptr::null_mut();
        let bad = CString::new("d +").unwrap();
        assert_eq!(ccr_normal_order(bad.as_ptr(), &mut s), CcrStatus::ParseError);
    }
}

#[test]
fn algebra_orbits_and_pcf() {
    unsafe {
        let e = CString::new("d z").unwrap();
        let mut s = ptr::null_mut();
        assert_eq!(ccr_normal_order(e.as_ptr(), &mut s), CcrStatus::Ok);
        assert_eq!(CStr::from_ptr(s).to_str().unwrap(), "z d + 1");
        ccr_string_free(s);

        let mut o = CcrOrbit::SigmaPlus;
        assert_eq!(ccr_classify_orbit(0.0, 1.0, 1.0, &mut o), CcrStatus::Ok);
        assert_eq!(o, CcrOrbit::SigmaOne);
        assert_eq!(ccr_classify_orbit(0.0, 0.0, 0.0, &mut o), CcrStatus::ZeroVector);

        let (mut vr, mut vi, mut dr, mut di) = (0.0, 0.0, 0.0, 0.0);
        assert_eq!(ccr_weber_d(1.0, 2.0, 0.0, &mut vr, &mut vi, &mut dr, &mut di), CcrStatus::Ok);
        assert!((vr - 2.0 * (-1.0f64).exp()).abs() < 1e-13 && vi == 0.0);
    }
}

#[test]
fn canonical_reduction_and_multimode() {
    unsafe {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = [h, 0.0, -h, 0.0, h, 0.0, h, 0.0];
        let mut c = CcrCanonical::default();
        assert_eq!(ccr_reduce_canonical(v.as_ptr(), -0.25, 0.0, &mut c), CcrStatus::Ok);
        assert!(c.schroedinger && c.sign == 1);
        assert!((c.theta + 0.25).abs() < 1e-12 && (c.gamma - 1.0).abs() < 1e-12);

        let eta = [1i8, -1, 1];
        let mut m = ptr::null_mut();
        assert_eq!(ccr_multimode_build(eta.as_ptr(), 3, 6, &mut m), CcrStatus::Ok);
        assert_eq!(ccr_multimode_dim(m), 84);
        let (mut defect, mut star) = (-1i64, false);
        assert_eq!(ccr_multimode_check(m, &mut defect, &mut star), CcrStatus::Ok);
        assert_eq!(defect, 0);
        assert!(star);
        ccr_multimode_free(m);
        let bad = [1i8, 0];
        assert_eq!(ccr_multimode_build(bad.as_ptr(), 2, 3, &mut m), CcrStatus::InvalidInput);
    }
}

#[test]
fn header_declares_the_abi() {
    let header = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/ccr_krein.h");
    let text = std::fs::read_to_string(&header).expect("generated header");
    for name in [
        "ccr_rep_schroedinger",
        "ccr_rep_free",
        "ccr_rep_verify",
        "ccr_normal_order",
        "ccr_reduce_canonical",
        "ccr_multimode_build",
        "ccr_last_error_message",
        "CCR_STATUS_NULL_SUBREPRESENTATION",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }
}

/// Compiles and runs a small C program against the static library when a C
/// compiler and the archive are available.
#[test]
fn c_program_links_against_static_library() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let target =
        std::env::var_os("CARGO_TARGET_DIR").map(PathBuf::from).unwrap_or_else(|| manifest.join("../../target"));
    let profile = if cfg!(debug_assertions) { "debug" } else { "release" };
    let lib = target.join(profile).join("libccr_krein_ffi.a");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if !lib.exists() || Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("static library or C compiler unavailable; C smoke test not run");
        return;
    }
    let dir = std::env::temp_dir().join(format!("ccr_krein_ffi_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("smoke.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "ccr_krein.h"
int main(void) {
    CcrRep *rep = NULL;
    if (ccr_rep_schroedinger(-0.5, 2.0, 6, -1, &rep) != CCR_STATUS_OK) return 1;
    CcrRepReport r;
    if (ccr_rep_verify(rep, 10, &r) != CCR_STATUS_OK) return 2;
    ccr_rep_free(rep);
    if (!(r.star_property_max_relative < 1e-10) || !r.gauge_covariance_exact) return 3;
    char *s = NULL;
    if (ccr_normal_order("a a*", &s) != CCR_STATUS_OK) return 4;
    printf("%s\n", s);
    ccr_string_free(s);
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.join("smoke");
    let status = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "C program exited with {:?}", out.status);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "a* a + 1");
    std::fs::remove_dir_all(&dir).ok();
}
