//! C ABI over the `entrofunc` estimators.
//!
//! Every fallible function returns an [`EntrofuncStatus`] and writes its result
//! through an out-pointer. On failure, `entrofunc_last_error` returns a message
//! for the calling thread. Samples are opaque handles owned by the caller and
//! released with `entrofunc_sample_free`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use entrofunc::inference::{
    analyze, bregman_estimate, join_size_estimate, renyi_entropy_estimate, select_epsilon, variability_estimate,
};
use entrofunc::oracle::{true_q, DistributionSpec};
use entrofunc::simulation::ks_test;
use entrofunc::{Error, FunctionalOrder, Mode, Sample};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntrofuncStatus {
    Ok = 0,
    InvalidArgument = 1,
    InsufficientSample = 2,
    InvalidOrder = 3,
    UndefinedInterval = 4,
    Unsupported = 5,
    CombinatorialExplosion = 6,
    EmptyInput = 7,
    Config = 8,
    NullPointer = 9,
    Panic = 10,
}

impl From<&Error> for EntrofuncStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidArgument(_) => Self::InvalidArgument,
            Error::InsufficientSample(_) => Self::InsufficientSample,
            Error::InvalidOrder(_) => Self::InvalidOrder,
            Error::UndefinedInterval(_) => Self::UndefinedInterval,
            Error::Unsupported(_) => Self::Unsupported,
            Error::CombinatorialExplosion(..) => Self::CombinatorialExplosion,
            Error::EmptyInput(_) => Self::EmptyInput,
            Error::Config(_) => Self::Config,
        }
    }
}

/// Opaque sample handle.
pub struct EntrofuncSample(Sample);

/// Result of `entrofunc_analyze`. Flags are 1 when the optional part is present.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct EntrofuncReport {
    pub q: f64,
    pub kappa_hat: f64,
    pub raw_k: f64,
    pub has_entropy: c_int,
    pub h_hat: f64,
    pub has_interval: c_int,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub n1: usize,
    pub n2: usize,
    pub epsilon: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

enum Failure {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> EntrofuncStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            EntrofuncStatus::Ok
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(&e.to_string());
            EntrofuncStatus::from(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(&format!("null pointer: {what}"));
            EntrofuncStatus::NullPointer
        }
        Err(_) => {
            set_error("internal panic");
            EntrofuncStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn spec(p: *const c_char, what: &'static str) -> Result<DistributionSpec, Failure> {
    let s = deref(p, what).map(|_| CStr::from_ptr(p))?;
    let s = s
        .to_str()
        .map_err(|_| Error::InvalidArgument(format!("{what} is not UTF-8")))?;
    Ok(s.parse()?)
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn entrofunc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a continuous sample from `n` row-major points of dimension `dim`.
///
/// # Safety
/// `coords` must point to `n * dim` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn entrofunc_sample_continuous(
    coords: *const f64,
    n: usize,
    dim: usize,
    out: *mut *mut EntrofuncSample,
) -> EntrofuncStatus {
    guard(|| {
        let len = n.checked_mul(dim).ok_or_else(|| Error::InvalidArgument("n * dim overflows".into()))?;
        let c = slice(coords, len, "coords")?.to_vec();
        let s = Sample::continuous(dim, c)?;
        write(out, Box::into_raw(Box::new(EntrofuncSample(s))), "out")
    })
}

/// Builds a discrete sample from `n` row-major integer points of dimension `dim`.
///
/// # Safety
/// `coords` must point to `n * dim` integers; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn entrofunc_sample_discrete(
    coords: *const i64,
    n: usize,
    dim: usize,
    out: *mut *mut EntrofuncSample,
) -> EntrofuncStatus {
    guard(|| {
        let len = n.checked_mul(dim).ok_or_else(|| Error::InvalidArgument("n * dim overflows".into()))?;
        let c = slice(coords, len, "coords")?.to_vec();
        let s = Sample::discrete(dim, c)?;
        write(out, Box::into_raw(Box::new(EntrofuncSample(s))), "out")
    })
}

/// Releases a sample. Null is ignored.
///
/// # Safety
/// `sample` must come from a constructor above and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn entrofunc_sample_free(sample: *mut EntrofuncSample) {
    if !sample.is_null() {
        drop(Box::from_raw(sample));
    }
}

/// Number of observations, or 0 for null.
///
/// # Safety
/// `sample` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn entrofunc_sample_len(sample: *const EntrofuncSample) -> usize {
    sample.as_ref().map_or(0, |s| s.0.len())
}

/// Dimension, or 0 for null.
///
/// # Safety
/// `sample` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn entrofunc_sample_dim(sample: *const EntrofuncSample) -> usize {
    sample.as_ref().map_or(0, |s| s.0.dim())
}

unsafe fn optional<'a>(y: *const EntrofuncSample) -> Option<&'a Sample> {
    y.as_ref().map(|s| &s.0)
}

/// Estimate of `q_(r1,r2)`: normalized for continuous samples, exact coincidences
/// for discrete ones (`epsilon` ignored). `y` may be null when unused.
///
/// # Safety
/// `x` must be a live handle, `y` null or live, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn entrofunc_estimate_q(
    x: *const EntrofuncSample,
    y: *const EntrofuncSample,
    r1: u32,
    r2: u32,
    epsilon: f64,
    out: *mut f64,
) -> EntrofuncStatus {
    guard(|| {
        let x = &deref(x, "x")?.0;
        let order = FunctionalOrder::new(r1, r2)?;
        let q = match x.mode() {
            Mode::Continuous => entrofunc::estimate_q(x, optional(y), order, epsilon)?,
            Mode::Discrete => entrofunc::estimate_q_discrete(x, optional(y), order)?,
        };
        write(out, q.value, "out")
    })
}

/// Estimate, variance, entropy and, when `level` lies in (0,1), a confidence interval.
///
/// # Safety
/// `x` must be a live handle, `y` null or live, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn entrofunc_analyze(
    x: *const EntrofuncSample,
    y: *const EntrofuncSample,
    r1: u32,
    r2: u32,
    epsilon: f64,
    level: f64,
    out: *mut EntrofuncReport,
) -> EntrofuncStatus {
    guard(|| {
        let x = &deref(x, "x")?.0;
        let order = FunctionalOrder::new(r1, r2)?;
        let level = (level > 0.0 && level < 1.0).then_some(level);
        let r = analyze(x, optional(y), order, epsilon, x.mode(), level)?;
        let mut rep = EntrofuncReport {
            q: r.q.value,
            kappa_hat: r.variance.kappa_hat,
            raw_k: r.variance.raw_k,
            n1: r.n1,
            n2: r.n2,
            epsilon: r.epsilon,
            ..Default::default()
        };
        if let Some(h) = r.entropy {
            rep.has_entropy = 1;
            rep.h_hat = h.h_hat;
        }
        if let Some(ci) = r.interval {
            rep.has_interval = 1;
            rep.ci_lower = ci.lower;
            rep.ci_upper = ci.upper;
        }
        write(out, rep, "out")
    })
}

/// Variability `v = -log q_(1,1)`.
///
/// # Safety
/// `x` and `y` must be live handles, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn entrofunc_variability(
    x: *const EntrofuncSample,
    y: *const EntrofuncSample,
    epsilon: f64,
    out: *mut f64,
) -> EntrofuncStatus {
    guard(|| {
        let v = variability_estimate(&deref(x, "x")?.0, &deref(y, "y")?.0, epsilon)?;
        write(out, v.h_hat, "out")
    })
}

/// Rényi entropy of integer order `s >= 2`.
///
/// # Safety
/// `x` must be a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn entrofunc_renyi_entropy(
    x: *const EntrofuncSample,
    s: u32,
    epsilon: f64,
    out: *mut f64,
) -> EntrofuncStatus {
    guard(|| {
        let h = renyi_entropy_estimate(&deref(x, "x")?.0, s, epsilon)?;
        write(out, h.h_hat, "out")
    })
}

/// Bregman distance `B_s` between the laws of X and Y, or the symmetrized `K_s`
/// when `symmetrized` is non-zero.
///
/// # Safety
/// `x` and `y` must be live handles, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn entrofunc_bregman(
    x: *const EntrofuncSample,
    y: *const EntrofuncSample,
    s: u32,
    epsilon: f64,
    symmetrized: c_int,
    out: *mut f64,
) -> EntrofuncStatus {
    guard(|| {
        let b = bregman_estimate(&deref(x, "x")?.0, &deref(y, "y")?.0, s, epsilon, symmetrized != 0)?;
        write(out, b.value, "out")
    })
}

/// Expected ε-join size `m1 m2 ε^d b_1(d) e^{-v}`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn entrofunc_join_size(
    m1: u64,
    m2: u64,
    epsilon: f64,
    dim: usize,
    variability: f64,
    out: *mut f64,
) -> EntrofuncStatus {
    guard(|| write(out, join_size_estimate(m1, m2, epsilon, dim, variability)?, "out"))
}

/// Rate-based bandwidth for Hölder smoothness `alpha` and constant `c`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn entrofunc_select_epsilon(
    n: usize,
    dim: usize,
    r: u32,
    alpha: f64,
    c: f64,
    out: *mut f64,
) -> EntrofuncStatus {
    guard(|| write(out, select_epsilon(n, dim, r, alpha, c)?, "out"))
}

/// One-sample Kolmogorov-Smirnov test against N(0,1).
///
/// # Safety
/// `values` must point to `n` doubles; `statistic` and `p_value` writable.
#[no_mangle]
pub unsafe extern "C" fn entrofunc_ks_test(
    values: *const f64,
    n: usize,
    statistic: *mut f64,
    p_value: *mut f64,
) -> EntrofuncStatus {
    guard(|| {
        let r = ks_test(slice(values, n, "values")?)?;
        write(statistic, r.statistic, "statistic")?;
        write(p_value, r.p_value, "p_value")
    })
}

/// Reference `q_(r1,r2)` for catalog distributions written as e.g.
/// `"gaussian1d(0,1.5)"` or `"bernoulliProduct(3,0.8)"`. `dist_y` may be null.
///
/// # Safety
/// `dist_x` must be a NUL-terminated string, `dist_y` null or one, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn entrofunc_true_q(
    dist_x: *const c_char,
    dist_y: *const c_char,
    r1: u32,
    r2: u32,
    out: *mut f64,
) -> EntrofuncStatus {
    guard(|| {
        let x = spec(dist_x, "dist_x")?;
        let y = if dist_y.is_null() { None } else { Some(spec(dist_y, "dist_y")?) };
        write(out, true_q(&x, y.as_ref(), FunctionalOrder::new(r1, r2)?)?, "out")
    })
}
