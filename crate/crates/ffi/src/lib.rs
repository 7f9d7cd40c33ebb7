//! C interface to `fpe-similarity`.
//!
//! Every call returns an [`FpeStatus`]; results go through out-pointers.
//! On failure, [`fpe_last_error`] gives a message for the calling thread.
//! Solutions are opaque handles: create with one of the `*_new` functions,
//! release with [`fpe_solution_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use fpe_similarity::profiles::Polynomial;
use fpe_similarity::qes::{fpe_reducible, QesOde};
use fpe_similarity::scaling::solve_exponents;
use fpe_similarity::solutions::{
    crossing_time, exponential_solution, gamma_solution, gaussian_solution, SimilaritySolution, Symmetry,
};
use fpe_similarity::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FpeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    /// No normalizable solution for these parameters.
    Unnormalizable = 3,
    /// The operation does not apply to this family or input.
    Unsupported = 4,
    Numerical = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FpeSymmetry {
    MirrorMu2 = 0,
    ConjugateParams = 1,
    RatioRescale = 2,
    TimeInversion = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FpeProfileStats {
    pub peak_location: f64,
    pub peak_value: f64,
    /// NaN when the half maximum is not reached on both sides.
    pub fwhm: f64,
    pub mean: f64,
    pub variance: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FpeExponents {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub alpha: f64,
}

/// Opaque solution handle.
pub struct FpeSolution(SimilaritySolution);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> FpeStatus {
    match err {
        Error::InvalidInput(_) | Error::InvalidTime(_) | Error::Precondition(_) | Error::InconsistentScaling { .. } => {
            FpeStatus::InvalidInput
        }
        Error::Unnormalizable(_) | Error::DegenerateFamily(_) => FpeStatus::Unnormalizable,
        Error::Unsupported(_)
        | Error::UnsupportedStatistic(_)
        | Error::UnsupportedTransform { .. }
        | Error::UndefinedCrossing
        | Error::DegenerateTimeScaling => FpeStatus::Unsupported,
        _ => FpeStatus::Numerical,
    }
}

/// Runs `f`, records any error or panic, and maps it to a status.
fn guard(f: impl FnOnce() -> Result<(), FpeStatus>) -> FpeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FpeStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            FpeStatus::Panic
        }
    }
}

fn check<T>(r: fpe_similarity::Result<T>) -> Result<T, FpeStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

unsafe fn out_ref<'a, T>(p: *mut T) -> Result<&'a mut T, FpeStatus> {
    p.as_mut().ok_or_else(|| {
        set_error("null output pointer".into());
        FpeStatus::NullPointer
    })
}

unsafe fn sol_ref<'a>(h: *const FpeSolution) -> Result<&'a SimilaritySolution, FpeStatus> {
    h.as_ref().map(|s| &s.0).ok_or_else(|| {
        set_error("null solution handle".into());
        FpeStatus::NullPointer
    })
}

unsafe fn poly(p: *const f64, n: usize, name: &str) -> Result<Polynomial, FpeStatus> {
    if p.is_null() || n == 0 {
        set_error(format!("{name}: empty coefficient list"));
        return Err(if p.is_null() { FpeStatus::NullPointer } else { FpeStatus::InvalidInput });
    }
    check(Polynomial::new(std::slice::from_raw_parts(p, n)))
}

fn emit(out: *mut *mut FpeSolution, sol: fpe_similarity::Result<SimilaritySolution>) -> Result<(), FpeStatus> {
    let out = unsafe { out_ref(out)? };
    *out = Box::into_raw(Box::new(FpeSolution(check(sol)?)));
    Ok(())
}

/// Message for the last failed call on this thread. Valid until the next
/// failing call on the same thread; empty if none failed yet.
#[no_mangle]
pub extern "C" fn fpe_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn fpe_gaussian_new(
    alpha: f64,
    mu1: f64,
    mu2: f64,
    mu4: f64,
    out: *mut *mut FpeSolution,
) -> FpeStatus {
    guard(|| emit(out, gaussian_solution(alpha, mu1, mu2, mu4)))
}

/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn fpe_exponential_new(alpha: f64, mu2: f64, mu4: f64, out: *mut *mut FpeSolution) -> FpeStatus {
    guard(|| emit(out, exponential_solution(alpha, mu2, mu4)))
}

/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn fpe_gamma_new(
    alpha: f64,
    mu1: f64,
    mu2: f64,
    mu3: f64,
    out: *mut *mut FpeSolution,
) -> FpeStatus {
    guard(|| emit(out, gamma_solution(alpha, mu1, mu2, mu3)))
}

/// # Safety
/// `h` must be null or a handle from this library that was not freed yet.
#[no_mangle]
pub unsafe extern "C" fn fpe_solution_free(h: *mut FpeSolution) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Density W(x, t); zero outside the support.
///
/// # Safety
/// `h` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fpe_solution_density(h: *const FpeSolution, x: f64, t: f64, out: *mut f64) -> FpeStatus {
    guard(|| {
        let sol = sol_ref(h)?;
        *out_ref(out)? = check(sol.density(x, t))?;
        Ok(())
    })
}

/// Probability current J(x, t).
///
/// # Safety
/// `h` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fpe_solution_current(h: *const FpeSolution, x: f64, t: f64, out: *mut f64) -> FpeStatus {
    guard(|| {
        let sol = sol_ref(h)?;
        *out_ref(out)? = check(sol.current(x, t))?;
        Ok(())
    })
}

/// Cumulative distribution at x.
///
/// # Safety
/// `h` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fpe_solution_cdf(h: *const FpeSolution, x: f64, t: f64, out: *mut f64) -> FpeStatus {
    guard(|| {
        let sol = sol_ref(h)?;
        *out_ref(out)? = check(sol.cdf(x, t))?;
        Ok(())
    })
}

/// # Safety
/// `h` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fpe_solution_quantile(h: *const FpeSolution, u: f64, t: f64, out: *mut f64) -> FpeStatus {
    guard(|| {
        let sol = sol_ref(h)?;
        *out_ref(out)? = check(sol.quantile(u, t))?;
        Ok(())
    })
}

/// # Safety
/// `h` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fpe_solution_stats(h: *const FpeSolution, t: f64, out: *mut FpeProfileStats) -> FpeStatus {
    guard(|| {
        let sol = sol_ref(h)?;
        let s = check(sol.profile_stats(t))?;
        *out_ref(out)? = FpeProfileStats {
            peak_location: s.peak_location,
            peak_value: s.peak_value,
            fwhm: s.fwhm.unwrap_or(f64::NAN),
            mean: s.mean,
            variance: s.variance,
        };
        Ok(())
    })
}

/// Applies a symmetry (an `FpeSymmetry` value) and returns a new handle.
/// `k` is only read for `RatioRescale`.
///
/// # Safety
/// `h` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fpe_solution_apply_symmetry(
    h: *const FpeSolution,
    symmetry: u32,
    k: f64,
    out: *mut *mut FpeSolution,
) -> FpeStatus {
    guard(|| {
        let sol = sol_ref(h)?;
        // a C enum may hold any integer, so match on the raw value
        let transform = match symmetry {
            s if s == FpeSymmetry::MirrorMu2 as u32 => Symmetry::MirrorMu2,
            s if s == FpeSymmetry::ConjugateParams as u32 => Symmetry::ConjugateParams,
            s if s == FpeSymmetry::RatioRescale as u32 => Symmetry::RatioRescale(k),
            s if s == FpeSymmetry::TimeInversion as u32 => Symmetry::TimeInversion,
            other => {
                set_error(format!("unknown symmetry {other}"));
                return Err(FpeStatus::InvalidInput);
            }
        };
        emit(out, sol.apply_symmetry(transform))
    })
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fpe_solve_exponents(a: f64, d: f64, e: f64, out: *mut FpeExponents) -> FpeStatus {
    guard(|| {
        let x = check(solve_exponents(a, d, e))?;
        *out_ref(out)? = FpeExponents {
            a: x.a,
            b: x.b,
            c: x.c,
            d: x.d,
            e: x.e,
            alpha: x.alpha,
        };
        Ok(())
    })
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fpe_crossing_time(mu1: f64, out: *mut f64) -> FpeStatus {
    guard(|| {
        *out_ref(out)? = check(crossing_time(mu1))?;
        Ok(())
    })
}

/// Tests `P y'' + Q y' + R y = 0` for reducibility to a Fokker-Planck
/// equation. Coefficients are in ascending powers of z.
///
/// # Safety
/// Each array must hold at least the given number of values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fpe_qes_check(
    p: *const f64,
    n_p: usize,
    q: *const f64,
    n_q: usize,
    r: *const f64,
    n_r: usize,
    out_reducible: *mut bool,
) -> FpeStatus {
    guard(|| {
        let ode = check(QesOde::from_polynomials(poly(p, n_p, "P")?, poly(q, n_q, "Q")?, poly(r, n_r, "R")?))?;
        *out_ref(out_reducible)? = fpe_reducible(&ode);
        Ok(())
    })
}
