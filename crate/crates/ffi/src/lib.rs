//! C ABI for `treewalk`.
//!
//! Models are opaque [`TwModel`] handles created by one of the
//! `tw_model_from_*` constructors and released with [`tw_model_free`]. Every
//! fallible function returns a [`TwStatus`]; on failure a message is
//! available from [`tw_last_error`] on the same thread. Strings returned
//! through `char **` out-parameters are owned by the caller and must be
//! released with [`tw_string_free`]. A handle must not be used from two
//! threads at once.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use num::complex::Complex64;
use treewalk::cli::commands::{asympt_pair, Analysis};
use treewalk::cli::validate::cmd_validate;
use treewalk::cli::{stock, ModelConfig};
use treewalk::green_eval::GreenSystem;
use treewalk::Error;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Model = 4,
    Argument = 5,
    Budget = 6,
    Numeric = 7,
    Internal = 8,
    Io = 9,
    Panic = 10,
}

impl From<&Error> for TwStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Parse { .. } => TwStatus::Parse,
            Error::Model(_) => TwStatus::Model,
            Error::Argument(_) => TwStatus::Argument,
            Error::Budget(_) => TwStatus::Budget,
            Error::Numeric(_) => TwStatus::Numeric,
            Error::Internal(_) => TwStatus::Internal,
            Error::Io(_) => TwStatus::Io,
        }
    }
}

/// A complex number `re + i·im`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TwComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for TwComplex {
    fn from(z: Complex64) -> Self {
        TwComplex { re: z.re, im: z.im }
    }
}

/// Structural summary of a model.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TwModelInfo {
    /// Period `d`.
    pub period: u64,
    /// Range `k`.
    pub range: usize,
    /// Number of coordinates of the fixed-point system.
    pub coordinates: usize,
    /// Coordinates with bounded excursions.
    pub bounded: usize,
}

/// Opaque model handle.
pub struct TwModel {
    analysis: Analysis<'static>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Run `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (TwStatus, String)>) -> TwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TwStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside treewalk".into());
            TwStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (TwStatus, String) {
    ((&e).into(), e.to_string())
}

/// Borrow a C string argument.
///
/// # Safety
/// `p` must be NULL or point to a NUL-terminated string valid for `'a`.
unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (TwStatus, String)> {
    if p.is_null() {
        return Err((TwStatus::NullPointer, format!("{what} is NULL")));
    }
    // SAFETY: non-null and NUL-terminated per the caller's contract.
    unsafe { CStr::from_ptr(p) }.to_str().map_err(|_| (TwStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

/// Borrow a model handle.
///
/// # Safety
/// `m` must be NULL or a live handle from a `tw_model_from_*` constructor.
unsafe fn model_arg<'a>(m: *const TwModel) -> Result<&'a TwModel, (TwStatus, String)> {
    // SAFETY: per the caller's contract.
    unsafe { m.as_ref() }.ok_or((TwStatus::NullPointer, "model handle is NULL".into()))
}

fn out_ptr<T>(p: *mut T, what: &str) -> Result<(), (TwStatus, String)> {
    if p.is_null() {
        Err((TwStatus::NullPointer, format!("{what} is NULL")))
    } else {
        Ok(())
    }
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("interior NULs removed").into_raw()
}

/// Message of the last failure on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Release a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a string returned through a `char **` out-parameter
/// of this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn tw_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: `s` came from `CString::into_raw` per the contract.
        drop(unsafe { CString::from_raw(s) });
    }
}

fn install(cfg: ModelConfig, out: *mut *mut TwModel) -> Result<(), (TwStatus, String)> {
    let analysis = Analysis::owned(cfg).map_err(lib_err)?;
    let handle = Box::into_raw(Box::new(TwModel { analysis }));
    // SAFETY: `out` was checked non-null by the caller of `install`.
    unsafe { *out = handle };
    Ok(())
}

/// Build a model from the text of a TOML configuration.
///
/// # Safety
/// `toml` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tw_model_from_toml(toml: *const c_char, out: *mut *mut TwModel) -> TwStatus {
    guard(|| {
        out_ptr(out, "out")?;
        // SAFETY: forwarded caller contract.
        let src = unsafe { str_arg(toml, "toml") }?;
        install(ModelConfig::from_str(src).map_err(lib_err)?, out)
    })
}

/// Build a model from a configuration file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tw_model_from_file(path: *const c_char, out: *mut *mut TwModel) -> TwStatus {
    guard(|| {
        out_ptr(out, "out")?;
        // SAFETY: forwarded caller contract.
        let p = unsafe { str_arg(path, "path") }?;
        install(ModelConfig::from_file(Path::new(p)).map_err(lib_err)?, out)
    })
}

/// Build one of the bundled models (`srw_free`, `mu`, `green_poly`, …).
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tw_model_from_stock(name: *const c_char, out: *mut *mut TwModel) -> TwStatus {
    guard(|| {
        out_ptr(out, "out")?;
        // SAFETY: forwarded caller contract.
        let n = unsafe { str_arg(name, "name") }?;
        install(stock(n).map_err(lib_err)?, out)
    })
}

/// Release a model. NULL is ignored.
///
/// # Safety
/// `m` must be NULL or a handle that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn tw_model_free(m: *mut TwModel) {
    if !m.is_null() {
        // SAFETY: `m` came from `Box::into_raw` per the contract.
        drop(unsafe { Box::from_raw(m) });
    }
}

/// Period, range and coordinate counts.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tw_model_info(m: *const TwModel, out: *mut TwModelInfo) -> TwStatus {
    guard(|| {
        out_ptr(out, "out")?;
        // SAFETY: forwarded caller contract.
        let a = &unsafe { model_arg(m) }?.analysis;
        let info = TwModelInfo {
            period: a.cfg.model.d(),
            range: a.cfg.model.k(),
            coordinates: a.sys.dim(),
            bounded: a.bounded().iter().filter(|b| **b).count(),
        };
        // SAFETY: checked non-null above.
        unsafe { *out = info };
        Ok(())
    })
}

/// Radius of convergence `R` of the Green function (the branch point).
///
/// # Safety
/// `m` must be a live handle; `radius` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tw_branch_point(m: *const TwModel, radius: *mut f64) -> TwStatus {
    guard(|| {
        out_ptr(radius, "radius")?;
        // SAFETY: forwarded caller contract.
        let a = &unsafe { model_arg(m) }?.analysis;
        let r = a.singular().map_err(lib_err)?.r;
        // SAFETY: checked non-null above.
        unsafe { *radius = r };
        Ok(())
    })
}

/// Exact `p^(n)(x, y)` as a `"num/den"` string (free with [`tw_string_free`]).
///
/// # Safety
/// `m` must be a live handle; `x`, `y` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tw_oracle_pn(
    m: *const TwModel,
    x: *const c_char,
    y: *const c_char,
    n: usize,
    out: *mut *mut c_char,
) -> TwStatus {
    guard(|| {
        out_ptr(out, "out")?;
        // SAFETY: forwarded caller contract.
        let (a, xs, ys) = unsafe { (&model_arg(m)?.analysis, str_arg(x, "x")?, str_arg(y, "y")?) };
        let xv = a.vertex(xs).map_err(lib_err)?;
        let yv = a.vertex(ys).map_err(lib_err)?;
        let p = a.cfg.model.oracle_pn(&xv, &yv, n, a.cfg.budgets.oracle_states).map_err(lib_err)?;
        // SAFETY: checked non-null above.
        unsafe { *out = into_c_string(p.to_string()) };
        Ok(())
    })
}

/// `G_z(x, y)` and `F_z(x, y)` at `z = re + i·im`, `|z| ≤ R`.
///
/// # Safety
/// `m` must be a live handle; `x`, `y` NUL-terminated; `g`, `f` writable.
#[no_mangle]
pub unsafe extern "C" fn tw_green(
    m: *const TwModel,
    x: *const c_char,
    y: *const c_char,
    re: f64,
    im: f64,
    g: *mut TwComplex,
    f: *mut TwComplex,
) -> TwStatus {
    guard(|| {
        out_ptr(g, "g")?;
        out_ptr(f, "f")?;
        // SAFETY: forwarded caller contract.
        let (a, xs, ys) = unsafe { (&model_arg(m)?.analysis, str_arg(x, "x")?, str_arg(y, "y")?) };
        let xv = a.vertex(xs).map_err(lib_err)?;
        let yv = a.vertex(ys).map_err(lib_err)?;
        let z = Complex64::new(re, im);
        let r = a.singular().map_err(lib_err)?.r;
        if z.norm() > r * (1.0 + 1e-12) {
            return Err((TwStatus::Argument, format!("|z| = {} exceeds the radius {r}", z.norm())));
        }
        let v = a.solve_at(z).map_err(lib_err)?;
        let sys = GreenSystem::new(&a.sys, &yv);
        let (fv, gv) = sys.evaluate_many(std::slice::from_ref(&xv), z, &v).map_err(lib_err)?[0];
        // SAFETY: checked non-null above.
        unsafe {
            *g = gv.into();
            *f = fv.into();
        }
        Ok(())
    })
}

/// Constant `C` of `a_{dn+r} ~ C·R^{−dn}·n^{−3/2}` for `G(x, y)` (`full`) or
/// `F(x, y)`, from the square-root transfer. No oracle fit is run.
///
/// # Safety
/// `m` must be a live handle; `x`, `y` NUL-terminated; `constant` writable.
#[no_mangle]
pub unsafe extern "C" fn tw_transfer_constant(
    m: *const TwModel,
    x: *const c_char,
    y: *const c_char,
    full: bool,
    constant: *mut f64,
) -> TwStatus {
    guard(|| {
        out_ptr(constant, "constant")?;
        // SAFETY: forwarded caller contract.
        let (a, xs, ys) = unsafe { (&model_arg(m)?.analysis, str_arg(x, "x")?, str_arg(y, "y")?) };
        let xv = a.vertex(xs).map_err(lib_err)?;
        let yv = a.vertex(ys).map_err(lib_err)?;
        let row = asympt_pair(a, &xv, &yv, full, 0).map_err(lib_err)?;
        if !row.result.flags.is_empty() {
            return Err((TwStatus::Numeric, row.result.flags.join("; ")));
        }
        // SAFETY: checked non-null above.
        unsafe { *constant = row.result.constant };
        Ok(())
    })
}

/// Run the validation suite; `report` receives the CSV report and `passed`
/// whether no check failed.
///
/// # Safety
/// `m` must be a live handle; `report` and `passed` writable.
#[no_mangle]
pub unsafe extern "C" fn tw_validate(m: *const TwModel, report: *mut *mut c_char, passed: *mut bool) -> TwStatus {
    guard(|| {
        out_ptr(report, "report")?;
        out_ptr(passed, "passed")?;
        // SAFETY: forwarded caller contract.
        let a = &unsafe { model_arg(m) }?.analysis;
        let rep = cmd_validate(&a.cfg).map_err(lib_err)?;
        let text = rep.render().map_err(lib_err)?;
        // SAFETY: checked non-null above.
        unsafe {
            *report = into_c_string(text);
            *passed = rep.status == treewalk::cli::report::Status::Pass;
        }
        Ok(())
    })
}
