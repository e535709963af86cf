//! C ABI over `sltransfer`.
//!
//! Problems live behind an opaque `SlProblem` handle. Every call returns an
//! `SlStatus`; on failure the message is kept per thread and can be read with
//! `sl_last_error_message`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use sltransfer::io::ProblemFile;
use sltransfer::scattering::scattering_coefficients;
use sltransfer::{
    delta, eigenvalues, m_function, norming_constant, BoundaryAngles, Error, Potential, Problem,
    TransferMatrix,
};

/// Opaque problem handle.
pub struct SlProblem {
    inner: Problem,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlStatus {
    Ok = 0,
    NullPointer = 1,
    Config = 2,
    Precondition = 3,
    Overflow = 4,
    Pole = 5,
    DoubleRoot = 6,
    MissedRoots = 7,
    NonConvergent = 8,
    InsufficientData = 9,
    Singular = 10,
    Io = 11,
    Parse = 12,
    Panic = 13,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for SlComplex {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> SlStatus {
    match e {
        Error::Config(_) => SlStatus::Config,
        Error::Precondition(_) => SlStatus::Precondition,
        Error::Overflow { .. } => SlStatus::Overflow,
        Error::Pole { .. } => SlStatus::Pole,
        Error::DoubleRoot(_) => SlStatus::DoubleRoot,
        Error::MissedRoots { .. } => SlStatus::MissedRoots,
        Error::NonConvergent(_) => SlStatus::NonConvergent,
        Error::InsufficientData(_) => SlStatus::InsufficientData,
        Error::Singular(_) => SlStatus::Singular,
        Error::Io(_) => SlStatus::Io,
        Error::Parse(_) => SlStatus::Parse,
    }
}

fn guard(f: impl FnOnce() -> Result<(), SlStatus>) -> SlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            SlStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            SlStatus::Panic
        }
    }
}

fn lift<T>(r: sltransfer::Result<T>) -> Result<T, SlStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn null(what: &str) -> SlStatus {
    set_error(format!("{what} is null"));
    SlStatus::NullPointer
}

unsafe fn handle<'a>(p: *const SlProblem) -> Result<&'a Problem, SlStatus> {
    p.as_ref().map(|h| &h.inner).ok_or_else(|| null("problem"))
}

fn angles(alpha: f64, beta: f64) -> Result<BoundaryAngles, SlStatus> {
    lift(BoundaryAngles::new(alpha, beta))
}

/// # Safety
/// `dst` must be non-null and writable.
unsafe fn store(problem: Problem, dst: *mut *mut SlProblem) {
    *dst = Box::into_raw(Box::new(SlProblem { inner: problem }));
}

/// Creates a problem on `[-S, S]` from `q_len` uniform potential samples (odd count,
/// so that `x = 0` is a node) and the transfer matrix, normalized to unit determinant.
/// `steps = 0` keeps the default integrator resolution.
///
/// # Safety
/// `q_samples` must point to `q_len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_problem_new(
    half_width: f64,
    q_samples: *const f64,
    q_len: usize,
    m11: f64,
    m12: f64,
    m21: f64,
    m22: f64,
    steps: usize,
    out: *mut *mut SlProblem,
) -> SlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if q_samples.is_null() {
            return Err(null("q_samples"));
        }
        let q = std::slice::from_raw_parts(q_samples, q_len).to_vec();
        let potential = lift(Potential::new(half_width, q))?;
        let mut problem = Problem::new(potential, lift(TransferMatrix::new(m11, m12, m21, m22))?);
        if steps > 0 {
            problem = lift(problem.with_steps(steps))?;
        }
        store(problem, out);
        Ok(())
    })
}

/// Creates a problem from the JSON text of a problem file; its angles are ignored.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_problem_from_json(
    json: *const c_char,
    out: *mut *mut SlProblem,
) -> SlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|_| {
            set_error("json is not valid UTF-8".into());
            SlStatus::Parse
        })?;
        let (problem, _) = lift(ProblemFile::parse(text).and_then(|pf| pf.build(None)))?;
        store(problem, out);
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `problem` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sl_problem_free(problem: *mut SlProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Characteristic function `Delta_{alpha,beta}(lambda)`.
///
/// # Safety
/// `problem` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_delta(
    problem: *const SlProblem,
    alpha: f64,
    beta: f64,
    lambda: SlComplex,
    out: *mut SlComplex,
) -> SlStatus {
    guard(|| {
        let p = handle(problem)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let a = angles(alpha, beta)?;
        *out = lift(delta(p, &a, Complex64::new(lambda.re, lambda.im)))?.into();
        Ok(())
    })
}

/// Titchmarsh-Weyl function `m_{alpha,beta}(lambda)`; fails with `SL_STATUS_POLE` next to an eigenvalue.
///
/// # Safety
/// `problem` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_m_function(
    problem: *const SlProblem,
    alpha: f64,
    beta: f64,
    lambda: SlComplex,
    out: *mut SlComplex,
) -> SlStatus {
    guard(|| {
        let p = handle(problem)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let a = angles(alpha, beta)?;
        *out = lift(m_function(p, &a, Complex64::new(lambda.re, lambda.im)))?.into();
        Ok(())
    })
}

/// Writes the `count` smallest eigenvalues to `out`.
///
/// # Safety
/// `problem` must be a live handle; `out` must hold `count` doubles.
#[no_mangle]
pub unsafe extern "C" fn sl_eigenvalues(
    problem: *const SlProblem,
    alpha: f64,
    beta: f64,
    count: usize,
    out: *mut f64,
) -> SlStatus {
    guard(|| {
        let p = handle(problem)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let a = angles(alpha, beta)?;
        let data = lift(eigenvalues(p, &a, count))?;
        if data.eigenvalues.len() < count {
            set_error(format!("only {} eigenvalues found", data.eigenvalues.len()));
            return Err(SlStatus::MissedRoots);
        }
        let dst = std::slice::from_raw_parts_mut(out, count);
        dst.copy_from_slice(&data.eigenvalues[..count]);
        Ok(())
    })
}

/// Norming constant `a_n = int w_alpha^2` at the eigenvalue `lambda_n`.
///
/// # Safety
/// `problem` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_norming_constant(
    problem: *const SlProblem,
    alpha: f64,
    beta: f64,
    lambda_n: f64,
    out: *mut f64,
) -> SlStatus {
    guard(|| {
        let p = handle(problem)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let a = angles(alpha, beta)?;
        *out = lift(norming_constant(p, &a, lambda_n))?;
        Ok(())
    })
}

/// Scattering coefficients `A(xi)`, `B(xi)` for real `xi != 0`.
///
/// # Safety
/// `problem` must be a live handle; `a` and `b` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_scattering_coefficients(
    problem: *const SlProblem,
    xi: f64,
    a: *mut SlComplex,
    b: *mut SlComplex,
) -> SlStatus {
    guard(|| {
        let p = handle(problem)?;
        let a = a.as_mut().ok_or_else(|| null("a"))?;
        let b = b.as_mut().ok_or_else(|| null("b"))?;
        let (ca, cb) = lift(scattering_coefficients(p, xi))?;
        *a = ca.into();
        *b = cb.into();
        Ok(())
    })
}

/// Copies the calling thread's last error message (NUL-terminated, truncated to fit)
/// and returns the full message length excluding the terminator.
///
/// # Safety
/// `buf` must hold `len` bytes, or be null with `len = 0` to query the length.
#[no_mangle]
pub unsafe extern "C" fn sl_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}
