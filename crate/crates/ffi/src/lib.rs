//! C ABI over `ccr-krein`.
//!
//! Every function returns a [`CcrStatus`]; results are written through out
//! pointers. Objects are opaque handles released with the matching `_free`
//! function. The message of the most recent failure on the calling thread
//! is available from [`ccr_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use ccr_krein::cli::gauge_samples;
use ccr_krein::expr::parse_element;
use ccr_krein::krein::{
    build_antifock, build_fock_bargmann, build_schroedinger_theta, reduce_to_canonical, verify_rep, BasisRep,
    CanonicalType, Flavor, Sign,
};
use ccr_krein::multimode::{build_multimode_rep, MultimodeRep};
use ccr_krein::sl2::{classify_orbit, Mat2, OrbitKind, SlVector};
use ccr_krein::{algebra::EtaSignature, pcf, Error};
use num_complex::Complex64;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CcrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    ParseError = 3,
    DomainError = 4,
    NullSubrepresentation = 5,
    NotUnimodular = 6,
    NotRegularizable = 7,
    NotHermitian = 8,
    Degenerate = 9,
    ZeroVector = 10,
    ZeroInput = 11,
    AliasingRisk = 12,
    IncompatibleAlgebras = 13,
    InvalidInvolution = 14,
    SingularTransformation = 15,
    BufferTooSmall = 16,
    Panic = 17,
}

impl From<&Error> for CcrStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::IncompatibleAlgebras(_) => CcrStatus::IncompatibleAlgebras,
            Error::NotUnimodular { .. } => CcrStatus::NotUnimodular,
            Error::InvalidInvolution(_) => CcrStatus::InvalidInvolution,
            Error::ZeroVector => CcrStatus::ZeroVector,
            Error::SingularTransformation(_) => CcrStatus::SingularTransformation,
            Error::AliasingRisk { .. } => CcrStatus::AliasingRisk,
            Error::DomainError(_) => CcrStatus::DomainError,
            Error::NullSubrepresentation(_) => CcrStatus::NullSubrepresentation,
            Error::NotRegularizable(_) => CcrStatus::NotRegularizable,
            Error::NotHermitian => CcrStatus::NotHermitian,
            Error::Degenerate(_) => CcrStatus::Degenerate,
            Error::ZeroInput => CcrStatus::ZeroInput,
            Error::Parse { .. } => CcrStatus::ParseError,
            Error::InvalidInput(_) => CcrStatus::InvalidInput,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(e: Error) -> CcrStatus {
    set_error(e.to_string());
    CcrStatus::from(&e)
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), CcrStatus>) -> CcrStatus {
    match std::panic::catch_unwind(std::panic::AssertUnwindSafe(f)) {
        Ok(Ok(())) => CcrStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            CcrStatus::Panic
        }
    }
}

fn check<T>(r: ccr_krein::Result<T>) -> Result<T, CcrStatus> {
    r.map_err(fail)
}

fn nonnull<T>(p: *const T) -> Result<(), CcrStatus> {
    if p.is_null() {
        set_error("null pointer argument".into());
        Err(CcrStatus::NullPointer)
    } else {
        Ok(())
    }
}

/// Copies the last error message (NUL-terminated) into `buf`. Returns the
/// length without the terminator, or 0 when there is no error.
///
/// # Safety
/// `buf` must be valid for `len` bytes or null.
#[no_mangle]
pub unsafe extern "C" fn ccr_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match &*e.borrow() {
        Some(msg) => {
            let bytes = msg.as_bytes_with_nul();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len);
                ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
                *buf.add(n - 1) = 0;
            }
            bytes.len() - 1
        }
        None => 0,
    })
}

/// Opaque single-mode representation.
pub struct CcrRep(BasisRep);

/// Opaque multimode representation.
pub struct CcrMultimode(MultimodeRep);

unsafe fn emit<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

/// Fock representation on levels `0..=levels`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ccr_rep_fock(levels: usize, out: *mut *mut CcrRep) -> CcrStatus {
    guard(|| {
        nonnull(out)?;
        emit(out, CcrRep(build_fock_bargmann(levels)));
        Ok(())
    })
}

/// Anti-Fock representation; `schroedinger_flavor` selects the label.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ccr_rep_antifock(
    levels: usize,
    schroedinger_flavor: bool,
    out: *mut *mut CcrRep,
) -> CcrStatus {
    guard(|| {
        nonnull(out)?;
        let flavor = if schroedinger_flavor { Flavor::Schroedinger } else { Flavor::Bargmann };
        emit(out, CcrRep(build_antifock(levels, flavor)));
        Ok(())
    })
}

/// Schroedinger-type representation; `sign` is `+1` or `-1`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ccr_rep_schroedinger(
    theta: f64,
    gamma: f64,
    levels: usize,
    sign: i32,
    out: *mut *mut CcrRep,
) -> CcrStatus {
    guard(|| {
        nonnull(out)?;
        let sign = match sign {
            1 => Sign::Plus,
            -1 => Sign::Minus,
            _ => return Err(fail(Error::InvalidInput(format!("sign must be +1 or -1, got {sign}")))),
        };
        emit(out, CcrRep(check(build_schroedinger_theta(theta, gamma, levels, sign))?));
        Ok(())
    })
}

/// # Safety
/// `rep` must come from a `ccr_rep_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ccr_rep_free(rep: *mut CcrRep) {
    if !rep.is_null() {
        drop(Box::from_raw(rep));
    }
}

/// # Safety
/// `rep` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ccr_rep_dim(rep: *const CcrRep) -> usize {
    if rep.is_null() {
        0
    } else {
        (*rep).0.dim()
    }
}

/// Writes the real parts of the Gram diagonal (one value per level).
///
/// # Safety
/// `rep` must be live; `out` valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ccr_rep_gram(rep: *const CcrRep, out: *mut f64, len: usize) -> CcrStatus {
    guard(|| {
        nonnull(rep)?;
        nonnull(out)?;
        let g = (*rep).0.gram_levels();
        if len < g.len() {
            set_error(format!("buffer holds {len} values, need {}", g.len()));
            return Err(CcrStatus::BufferTooSmall);
        }
        for (k, v) in g.iter().enumerate() {
            *out.add(k) = v.re;
        }
        Ok(())
    })
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CcrRepReport {
    pub star_property_max_residual: f64,
    pub star_property_max_relative: f64,
    pub ccr_max_residual: f64,
    pub gram_recursion_max_relative: f64,
    pub gauge_covariance_exact: bool,
    pub gauge_isometry_max_residual: f64,
}

/// Runs the representation checks with `samples` gauge parameters.
///
/// # Safety
/// `rep` must be live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ccr_rep_verify(rep: *const CcrRep, samples: usize, out: *mut CcrRepReport) -> CcrStatus {
    guard(|| {
        nonnull(rep)?;
        nonnull(out)?;
        let r = check(verify_rep(&(*rep).0, &gauge_samples(samples)))?;
        *out = CcrRepReport {
            star_property_max_residual: r.star_property_max_residual,
            star_property_max_relative: r.star_property_max_relative,
            ccr_max_residual: r.ccr_max_residual,
            gram_recursion_max_relative: r.gram_recursion_max_relative,
            gauge_covariance_exact: r.gauge_covariance_exact,
            gauge_isometry_max_residual: r.gauge_isometry_max_residual,
        };
        Ok(())
    })
}

/// Normal-orders an expression. The result is freed with
/// [`ccr_string_free`].
///
/// # Safety
/// `expr` must be a NUL-terminated string; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ccr_normal_order(expr: *const c_char, out: *mut *mut c_char) -> CcrStatus {
    guard(|| {
        nonnull(expr)?;
        nonnull(out)?;
        let text =
            CStr::from_ptr(expr).to_str().map_err(|_| fail(Error::InvalidInput("expression is not UTF-8".into())))?;
        let x = check(parse_element(text, None))?;
        *out = CString::new(x.to_string()).expect("no interior nul").into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ccr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CcrOrbit {
    SigmaPlus = 0,
    SigmaThree = 1,
    SigmaOne = 2,
    SigmaMinus = 3,
}

/// Classifies a real `(n3, n-, n+)`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ccr_classify_orbit(n3: f64, nminus: f64, nplus: f64, out: *mut CcrOrbit) -> CcrStatus {
    guard(|| {
        nonnull(out)?;
        let o = check(classify_orbit(&SlVector::from_f64(n3, nminus, nplus)))?;
        *out = match o.kind {
            OrbitKind::SigmaPlus => CcrOrbit::SigmaPlus,
            OrbitKind::SigmaThree => CcrOrbit::SigmaThree,
            OrbitKind::SigmaOne => CcrOrbit::SigmaOne,
            OrbitKind::SigmaMinus => CcrOrbit::SigmaMinus,
        };
        Ok(())
    })
}

/// `D_λ(x)` for complex `x`; writes value and derivative.
///
/// # Safety
/// Output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ccr_weber_d(
    lambda: f64,
    x_re: f64,
    x_im: f64,
    value_re: *mut f64,
    value_im: *mut f64,
    deriv_re: *mut f64,
    deriv_im: *mut f64,
) -> CcrStatus {
    guard(|| {
        for p in [value_re, value_im, deriv_re, deriv_im] {
            nonnull(p)?;
        }
        let v = check(pcf::weber_d(lambda, Complex64::new(x_re, x_im)))?;
        *value_re = v.value.re;
        *value_im = v.value.im;
        *deriv_re = v.derivative.re;
        *deriv_im = v.derivative.im;
        Ok(())
    })
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CcrCanonical {
    /// `+1` or `-1`.
    pub sign: i32,
    pub schroedinger: bool,
    /// Reduced θ (Schroedinger type only).
    pub theta: f64,
    pub gamma: f64,
    pub gauge_phase: f64,
    pub level_shift: i64,
}

/// Reduces `V` (row-major, interleaved re/im, 8 doubles) with constant `μ`.
///
/// # Safety
/// `v` must hold 8 doubles; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ccr_reduce_canonical(
    v: *const f64,
    mu_re: f64,
    mu_im: f64,
    out: *mut CcrCanonical,
) -> CcrStatus {
    guard(|| {
        nonnull(v)?;
        nonnull(out)?;
        let e = std::slice::from_raw_parts(v, 8);
        let m = Mat2::from_pairs([[e[0], e[1]], [e[2], e[3]], [e[4], e[5]], [e[6], e[7]]]);
        let c = check(reduce_to_canonical(&m, Complex64::new(mu_re, mu_im)))?;
        let (schroedinger, theta) = match c.rep_type {
            CanonicalType::Bargmann => (false, 0.0),
            CanonicalType::Schroedinger { theta } => (true, theta),
        };
        *out = CcrCanonical {
            sign: c.sign.factor() as i32,
            schroedinger,
            theta,
            gamma: c.gamma,
            gauge_phase: c.gauge_phase,
            level_shift: c.level_shift,
        };
        Ok(())
    })
}

/// Multimode representation with signs `eta[0..modes]` (each ±1) and
/// total-degree cap `degree`.
///
/// # Safety
/// `eta` valid for `modes` bytes; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ccr_multimode_build(
    eta: *const i8,
    modes: usize,
    degree: u32,
    out: *mut *mut CcrMultimode,
) -> CcrStatus {
    guard(|| {
        nonnull(eta)?;
        nonnull(out)?;
        let signs = std::slice::from_raw_parts(eta, modes).to_vec();
        let sig = check(EtaSignature::new(signs))?;
        emit(out, CcrMultimode(check(build_multimode_rep(&sig, degree))?));
        Ok(())
    })
}

/// # Safety
/// `rep` must come from [`ccr_multimode_build`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ccr_multimode_free(rep: *mut CcrMultimode) {
    if !rep.is_null() {
        drop(Box::from_raw(rep));
    }
}

/// # Safety
/// `rep` must be live.
#[no_mangle]
pub unsafe extern "C" fn ccr_multimode_dim(rep: *const CcrMultimode) -> usize {
    if rep.is_null() {
        0
    } else {
        (*rep).0.dim()
    }
}

/// Exact CCR defect and *-property flag of a multimode representation.
///
/// # Safety
/// `rep` must be live; outputs valid.
#[no_mangle]
pub unsafe extern "C" fn ccr_multimode_check(
    rep: *const CcrMultimode,
    ccr_defect: *mut i64,
    star_exact: *mut bool,
) -> CcrStatus {
    guard(|| {
        nonnull(rep)?;
        nonnull(ccr_defect)?;
        nonnull(star_exact)?;
        *ccr_defect = (*rep).0.ccr_max_defect();
        *star_exact = (*rep).0.star_property_exact();
        Ok(())
    })
}
