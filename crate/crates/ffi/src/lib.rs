#![allow(clippy::missing_safety_doc)]

//! C interface to `fpa-core`.
//!
//! Series live behind opaque handles owned by the caller and released with
//! the matching `_free` function. Every fallible call returns an
//! [`FpaStatus`]; on failure the message is available from
//! [`fpa_last_error_message`] on the same thread. Strings returned through
//! `char **` out-parameters must be released with [`fpa_string_free`].
//!
//! A `maxdeg` argument below zero means "use the inputs' truncation degree".

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use fpa_core::compose::{composition, group_inverse, mixed_composition, wf_compose};
use fpa_core::feedback::{dynamic_feedback, relative_degree, static_feedback, static_feedback_fixed_point};
use fpa_core::growth::seminorm;
use fpa_core::io::{parse_cfps, parse_ncfps, write_cfps, write_ncfps};
use fpa_core::series::q_to_f64;
use fpa_core::shuffle::{shuffle, shuffle_inverse};
use fpa_core::{CommSeries, FpaError, NCSeries, Word};

/// Noncommutative series handle.
pub struct FpaSeries(NCSeries);

/// Commutative (static map) series handle.
pub struct FpaCommSeries(CommSeries);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FpaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    ShapeMismatch = 4,
    Inadmissible = 5,
    DegreeExceeded = 6,
    Domain = 7,
    NoConvergence = 8,
    ZeroConstant = 9,
    Panic = 10,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &FpaError) -> FpaStatus {
    match e {
        FpaError::DegreeExceeded { .. } => FpaStatus::DegreeExceeded,
        FpaError::ShapeMismatch(_) => FpaStatus::ShapeMismatch,
        FpaError::Inadmissible(_) => FpaStatus::Inadmissible,
        FpaError::Domain(_) => FpaStatus::Domain,
        FpaError::ZeroConstantTerm { .. } => FpaStatus::ZeroConstant,
        FpaError::NoConvergence { .. } => FpaStatus::NoConvergence,
        FpaError::Parse { .. } => FpaStatus::Parse,
    }
}

enum Fail {
    Status(FpaStatus, String),
    Core(FpaError),
}

impl From<FpaError> for Fail {
    fn from(e: FpaError) -> Self {
        Fail::Core(e)
    }
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> FpaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FpaStatus::Ok,
        Ok(Err(Fail::Core(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(&msg);
            s
        }
        Err(p) => {
            let msg =
                p.downcast_ref::<&str>().map(|s| s.to_string()).or_else(|| p.downcast_ref::<String>().cloned()).unwrap_or_else(|| "panic".into());
            set_error(&format!("internal panic: {msg}"));
            FpaStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail::Status(FpaStatus::NullPointer, format!("{what} is null"))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Status(FpaStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn put<T>(out: *mut *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(v));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = CString::new(s).map_err(|_| Fail::Status(FpaStatus::Domain, "string contains NUL".into()))?.into_raw();
    Ok(())
}

fn degree(maxdeg: i32, inputs: &[usize]) -> usize {
    if maxdeg < 0 {
        inputs.iter().copied().min().unwrap_or(0)
    } else {
        maxdeg as usize
    }
}

/// Message of the last failed call on this thread. Valid until the next call
/// that fails; never null.
#[no_mangle]
pub extern "C" fn fpa_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn fpa_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses `.ncfps` text.
#[no_mangle]
pub unsafe extern "C" fn fpa_series_parse(src: *const c_char, out: *mut *mut FpaSeries) -> FpaStatus {
    guard(|| put(out, FpaSeries(parse_ncfps(text(src, "src")?)?)))
}

/// Serializes to `.ncfps` text.
#[no_mangle]
pub unsafe extern "C" fn fpa_series_to_string(s: *const FpaSeries, out: *mut *mut c_char) -> FpaStatus {
    guard(|| put_string(out, write_ncfps(&borrow(s, "series")?.0)))
}

#[no_mangle]
pub unsafe extern "C" fn fpa_series_free(s: *mut FpaSeries) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of inputs `m`, outputs `ell` and truncation degree. Any out
/// pointer may be null.
#[no_mangle]
pub unsafe extern "C" fn fpa_series_shape(s: *const FpaSeries, inputs: *mut usize, outputs: *mut usize, maxdeg: *mut usize) -> FpaStatus {
    guard(|| {
        let s = &borrow(s, "series")?.0;
        for (p, v) in [(inputs, s.m()), (outputs, s.ell()), (maxdeg, s.maxdeg())] {
            if !p.is_null() {
                *p = v;
            }
        }
        Ok(())
    })
}

/// Coefficient of `word` (e.g. "x0x1", or "e" for the empty word) in output
/// `component`, as an exact rational string and optionally as a double.
#[no_mangle]
pub unsafe extern "C" fn fpa_series_coeff(
    s: *const FpaSeries,
    word: *const c_char,
    component: usize,
    exact: *mut *mut c_char,
    approx: *mut f64,
) -> FpaStatus {
    guard(|| {
        let s = &borrow(s, "series")?.0;
        let w = Word::parse(text(word, "word")?)?;
        let c = s.coeff(&w, component)?;
        if !approx.is_null() {
            *approx = q_to_f64(&c);
        }
        if !exact.is_null() {
            put_string(exact, c.to_string())?;
        }
        Ok(())
    })
}

/// Parses `.cfps` text.
#[no_mangle]
pub unsafe extern "C" fn fpa_comm_parse(src: *const c_char, out: *mut *mut FpaCommSeries) -> FpaStatus {
    guard(|| put(out, FpaCommSeries(parse_cfps(text(src, "src")?)?)))
}

/// Serializes to `.cfps` text.
#[no_mangle]
pub unsafe extern "C" fn fpa_comm_to_string(d: *const FpaCommSeries, out: *mut *mut c_char) -> FpaStatus {
    guard(|| put_string(out, write_cfps(&borrow(d, "series")?.0)))
}

#[no_mangle]
pub unsafe extern "C" fn fpa_comm_free(d: *mut FpaCommSeries) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

unsafe fn binary(
    a: *const FpaSeries,
    b: *const FpaSeries,
    maxdeg: i32,
    out: *mut *mut FpaSeries,
    op: fn(&NCSeries, &NCSeries, usize) -> fpa_core::Result<NCSeries>,
) -> FpaStatus {
    guard(|| {
        let (a, b) = (&borrow(a, "first operand")?.0, &borrow(b, "second operand")?.0);
        put(out, FpaSeries(op(a, b, degree(maxdeg, &[a.maxdeg(), b.maxdeg()]))?))
    })
}

unsafe fn unary(c: *const FpaSeries, maxdeg: i32, out: *mut *mut FpaSeries, op: fn(&NCSeries, usize) -> fpa_core::Result<NCSeries>) -> FpaStatus {
    guard(|| {
        let c = &borrow(c, "series")?.0;
        put(out, FpaSeries(op(c, degree(maxdeg, &[c.maxdeg()]))?))
    })
}

unsafe fn with_map(
    c: *const FpaSeries,
    d: *const FpaCommSeries,
    maxdeg: i32,
    out: *mut *mut FpaSeries,
    op: fn(&NCSeries, &CommSeries, usize) -> fpa_core::Result<NCSeries>,
) -> FpaStatus {
    guard(|| {
        let (c, d) = (&borrow(c, "series")?.0, &borrow(d, "static map")?.0);
        put(out, FpaSeries(op(c, d, degree(maxdeg, &[c.maxdeg()]))?))
    })
}

#[no_mangle]
pub unsafe extern "C" fn fpa_shuffle(a: *const FpaSeries, b: *const FpaSeries, maxdeg: i32, out: *mut *mut FpaSeries) -> FpaStatus {
    binary(a, b, maxdeg, out, shuffle)
}

#[no_mangle]
pub unsafe extern "C" fn fpa_shuffle_inverse(c: *const FpaSeries, maxdeg: i32, out: *mut *mut FpaSeries) -> FpaStatus {
    unary(c, maxdeg, out, shuffle_inverse)
}

/// Composition `c∘d`.
#[no_mangle]
pub unsafe extern "C" fn fpa_compose(c: *const FpaSeries, d: *const FpaSeries, maxdeg: i32, out: *mut *mut FpaSeries) -> FpaStatus {
    binary(c, d, maxdeg, out, composition)
}

/// Mixed composition `c∘̃d_δ`.
#[no_mangle]
pub unsafe extern "C" fn fpa_mixed_compose(c: *const FpaSeries, d: *const FpaSeries, maxdeg: i32, out: *mut *mut FpaSeries) -> FpaStatus {
    binary(c, d, maxdeg, out, mixed_composition)
}

/// Inverse in the output feedback group.
#[no_mangle]
pub unsafe extern "C" fn fpa_group_inverse(c: *const FpaSeries, maxdeg: i32, out: *mut *mut FpaSeries) -> FpaStatus {
    unary(c, maxdeg, out, group_inverse)
}

/// Wiener-Fliess composition `d∘̆c`.
#[no_mangle]
pub unsafe extern "C" fn fpa_wf_compose(d: *const FpaCommSeries, c: *const FpaSeries, maxdeg: i32, out: *mut *mut FpaSeries) -> FpaStatus {
    with_map(c, d, maxdeg, out, |c, d, n| wf_compose(d, c, n))
}

#[no_mangle]
pub unsafe extern "C" fn fpa_static_feedback(c: *const FpaSeries, d: *const FpaCommSeries, maxdeg: i32, out: *mut *mut FpaSeries) -> FpaStatus {
    with_map(c, d, maxdeg, out, static_feedback)
}

#[no_mangle]
pub unsafe extern "C" fn fpa_dynamic_feedback(c: *const FpaSeries, d: *const FpaSeries, maxdeg: i32, out: *mut *mut FpaSeries) -> FpaStatus {
    guard(|| {
        let (c, d) = (&borrow(c, "plant")?.0, &borrow(d, "feedback")?.0);
        put(out, FpaSeries(dynamic_feedback(c, d, degree(maxdeg, &[c.maxdeg()]))?))
    })
}

/// Static feedback by fixed-point iteration. `iterations` may be null.
#[no_mangle]
pub unsafe extern "C" fn fpa_static_feedback_fixed_point(
    c: *const FpaSeries,
    d: *const FpaCommSeries,
    maxdeg: i32,
    out: *mut *mut FpaSeries,
    iterations: *mut usize,
) -> FpaStatus {
    guard(|| {
        let (c, d) = (&borrow(c, "series")?.0, &borrow(d, "static map")?.0);
        let fp = static_feedback_fixed_point(c, d, degree(maxdeg, &[c.maxdeg()]))?;
        if !iterations.is_null() {
            *iterations = fp.iterations;
        }
        put(out, FpaSeries(fp.series))
    })
}

/// Relative degree of a single-input single-output series. `r` is set to -1
/// when undefined; `truncation_limited` to 1 when the truncation is too short
/// to decide.
#[no_mangle]
pub unsafe extern "C" fn fpa_relative_degree(c: *const FpaSeries, r: *mut i32, truncation_limited: *mut i32) -> FpaStatus {
    guard(|| {
        if r.is_null() {
            return Err(null("r"));
        }
        let rep = relative_degree(&borrow(c, "series")?.0)?;
        *r = rep.r.map_or(-1, |v| v as i32);
        if !truncation_limited.is_null() {
            *truncation_limited = rep.truncation_limited as i32;
        }
        Ok(())
    })
}

/// Seminorm at radius `radius` over the stored truncation.
#[no_mangle]
pub unsafe extern "C" fn fpa_seminorm(c: *const FpaSeries, radius: f64, out: *mut f64) -> FpaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = seminorm(&borrow(c, "series")?.0, radius)?.value;
        Ok(())
    })
}
