//! The C ABI exercised from Rust, plus a C program compiled against the
//! generated header and linked with the static library.

use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use treewalk_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn stock_model(name: &str) -> *mut TwModel {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { tw_model_from_stock(c(name).as_ptr(), &mut m) }, TwStatus::Ok);
    assert!(!m.is_null());
    m
}

fn last_error() -> String {
    let p = tw_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

#[test]
fn info_and_radius() {
    let m = stock_model("srw_free");
    let mut info = TwModelInfo::default();
    assert_eq!(unsafe { tw_model_info(m, &mut info) }, TwStatus::Ok);
    assert_eq!(info, TwModelInfo { period: 2, range: 1, coordinates: 6, bounded: 0 });
    let mut r = 0.0;
    assert_eq!(unsafe { tw_branch_point(m, &mut r) }, TwStatus::Ok);
    assert!((r - 3.0 / (2.0 * 2f64.sqrt())).abs() < 1e-12);
    unsafe { tw_model_free(m) };
}

#[test]
fn oracle_string_round_trip() {
    let m = stock_model("srw_free");
    let mut out: *mut c_char = ptr::null_mut();
    assert_eq!(unsafe { tw_oracle_pn(m, c("e").as_ptr(), c("e").as_ptr(), 6, &mut out) }, TwStatus::Ok);
    assert_eq!(unsafe { CStr::from_ptr(out) }.to_str().unwrap(), "29/243");
    unsafe {
        tw_string_free(out);
        tw_model_free(m);
    }
}

#[test]
fn green_at_the_radius_is_finite() {
    let m = stock_model("srw_free");
    let mut r = 0.0;
    assert_eq!(unsafe { tw_branch_point(m, &mut r) }, TwStatus::Ok);
    let (mut g, mut f) = (TwComplex::default(), TwComplex::default());
    let st = unsafe { tw_green(m, c("a").as_ptr(), c("e").as_ptr(), r, 0.0, &mut g, &mut f) };
    assert_eq!(st, TwStatus::Ok);
    // SRW on the 3-regular tree: G_R(e, e) = 4 and F_R(a, e) = 1/√2.
    assert!((f.re - 0.5f64.sqrt()).abs() < 1e-9, "{f:?}");
    assert!((g.re - 4.0 * 0.5f64.sqrt()).abs() < 1e-8, "{g:?}");
    unsafe { tw_model_free(m) };
}

#[test]
fn transfer_constant_of_the_return_probability() {
    let m = stock_model("srw_colored");
    let mut cst = 0.0;
    let st = unsafe { tw_transfer_constant(m, c("r").as_ptr(), c("r").as_ptr(), true, &mut cst) };
    assert_eq!(st, TwStatus::Ok);
    assert!((cst - 12.0 / (2.0 * std::f64::consts::PI.sqrt())).abs() < 1e-6, "{cst}");
    unsafe { tw_model_free(m) };
}

#[test]
fn errors_are_reported() {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { tw_model_from_stock(ptr::null(), &mut m) }, TwStatus::NullPointer);
    assert_eq!(unsafe { tw_model_from_stock(c("nope").as_ptr(), &mut m) }, TwStatus::Argument);
    assert!(last_error().contains("nope"));
    let bad = c("[model]\nkind = \"free_product\"\nname = \"x\"\n[free_product]\nfactors = [2, 2, 2]\nnames = [\"a\", \"b\", \"c\"]\n[[step]]\nword = \"a\"\np = \"1/0\"\n");
    assert_eq!(unsafe { tw_model_from_toml(bad.as_ptr(), &mut m) }, TwStatus::Parse);
    assert!(last_error().contains("line"), "{}", last_error());
    let mut r = 0.0;
    assert_eq!(unsafe { tw_branch_point(ptr::null(), &mut r) }, TwStatus::NullPointer);
    let m = stock_model("srw_free");
    let (mut g, mut f) = (TwComplex::default(), TwComplex::default());
    let st = unsafe { tw_green(m, c("zz").as_ptr(), c("e").as_ptr(), 0.5, 0.0, &mut g, &mut f) };
    assert_eq!(st, TwStatus::Argument);
    let st = unsafe { tw_green(m, c("e").as_ptr(), c("e").as_ptr(), 5.0, 0.0, &mut g, &mut f) };
    assert_eq!(st, TwStatus::Argument);
    unsafe {
        tw_model_free(m);
        tw_model_free(ptr::null_mut());
        tw_string_free(ptr::null_mut());
    }
}

#[test]
fn validate_through_the_abi() {
    let m = stock_model("srw_colored");
    let mut report: *mut c_char = ptr::null_mut();
    let mut passed = false;
    assert_eq!(unsafe { tw_validate(m, &mut report, &mut passed) }, TwStatus::Ok);
    let text = unsafe { CStr::from_ptr(report) }.to_str().unwrap().to_string();
    assert!(passed, "{text}");
    assert!(text.contains("transfer_vs_fit,PASS"));
    unsafe {
        tw_string_free(report);
        tw_model_free(m);
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(tw_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

/// `target/<profile>` of the running test binary.
fn profile_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_the_static_library() {
    let crate_dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = profile_dir().join("libtreewalk_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());
    let exe = Path::new(env!("CARGO_TARGET_TMPDIR")).join("treewalk_smoke");
    let status = Command::new(std::env::var("CC").unwrap_or_else(|_| "cc".into()))
        .arg(crate_dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
