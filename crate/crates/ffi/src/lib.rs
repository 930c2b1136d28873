//! C ABI over the `statdistill` core.
//!
//! Results are returned through opaque handles that the caller releases with
//! [`sd_result_free`]. Every fallible call returns an [`SdStatus`]; output
//! pointers are written only on `SD_STATUS_OK`.

use std::ffi::{c_char, c_int};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use statdistill::linalg::Matrix4;
use statdistill::measures::{self, MeasureError};
use statdistill::{
    distill, make_pair_state, summarize, DensityMatrix4, ProtocolConfig, ProtocolError,
    ProtocolResult, Statistics,
};

pub const SD_FERMION: u32 = 0;
pub const SD_BOSON: u32 = 1;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdStatus {
    Ok = 0,
    NullPointer = 1,
    NotNormalized = 2,
    NegativeWeight = 3,
    NotPsd = 4,
    NonFinite = 5,
    InvalidStatistics = 6,
    TooManySteps = 7,
    DegenerateStep = 8,
    InvalidState = 9,
    OutOfRange = 10,
    Internal = 11,
}

impl From<&ProtocolError> for SdStatus {
    fn from(e: &ProtocolError) -> Self {
        match e {
            ProtocolError::NotNormalized { .. } => SdStatus::NotNormalized,
            ProtocolError::NegativeWeight { .. } => SdStatus::NegativeWeight,
            ProtocolError::NotPsd { .. } => SdStatus::NotPsd,
            ProtocolError::NonFinite(_) => SdStatus::NonFinite,
            ProtocolError::TooManySteps { .. } => SdStatus::TooManySteps,
            ProtocolError::DegenerateStep(_) => SdStatus::DegenerateStep,
            ProtocolError::Measure(m) => m.into(),
            ProtocolError::AlreadyFlipped(_) => SdStatus::Internal,
        }
    }
}

impl From<&MeasureError> for SdStatus {
    fn from(e: &MeasureError) -> Self {
        match e {
            MeasureError::InvalidState(_) | MeasureError::NotXShaped { .. } => SdStatus::InvalidState,
            MeasureError::Linalg(_) => SdStatus::Internal,
        }
    }
}

/// Outcome of a protocol run.
pub struct SdProtocolResult {
    inner: ProtocolResult,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdSummary {
    pub initial_concurrence: f64,
    /// `|c|²/ab`; NaN when `ab = 0`.
    pub asymptotic_concurrence: f64,
    pub asymptotic_probability: f64,
    /// Asymptote minus initial concurrence; NaN when `ab = 0`.
    pub gain: f64,
    pub distillable: bool,
}

fn guard(f: impl FnOnce() -> SdStatus) -> SdStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(SdStatus::Internal)
}

fn statistics(code: u32) -> Option<Statistics> {
    match code {
        SD_FERMION => Some(Statistics::Fermion),
        SD_BOSON => Some(Statistics::Boson),
        _ => None,
    }
}

/// Runs `n` protocol steps on the pair `[[a, c], [c*, b]]` and stores a new
/// handle in `*out`.
///
/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn sd_distill(
    a: f64,
    b: f64,
    c_re: f64,
    c_im: f64,
    n: u32,
    statistics_code: u32,
    out: *mut *mut SdProtocolResult,
) -> SdStatus {
    if out.is_null() {
        return SdStatus::NullPointer;
    }
    guard(|| {
        let Some(stats) = statistics(statistics_code) else {
            return SdStatus::InvalidStatistics;
        };
        let result = make_pair_state(a, b, Complex64::new(c_re, c_im))
            .and_then(|pair| distill(&ProtocolConfig::new(pair, n, stats)));
        match result {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(SdProtocolResult { inner }));
                SdStatus::Ok
            }
            Err(e) => (&e).into(),
        }
    })
}

/// Releases a handle from [`sd_distill`]. Null is ignored.
///
/// # Safety
/// `handle` must be null or a live handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn sd_result_free(handle: *mut SdProtocolResult) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

unsafe fn with_result(
    handle: *const SdProtocolResult,
    f: impl FnOnce(&ProtocolResult) -> SdStatus,
) -> SdStatus {
    match handle.as_ref() {
        Some(h) => guard(|| f(&h.inner)),
        None => SdStatus::NullPointer,
    }
}

/// Cumulative success probability `p_f`.
///
/// # Safety
/// `handle` must be null or live; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn sd_result_probability(handle: *const SdProtocolResult, out: *mut f64) -> SdStatus {
    if out.is_null() {
        return SdStatus::NullPointer;
    }
    with_result(handle, |r| {
        *out = r.p_f;
        SdStatus::Ok
    })
}

/// Number of steps performed.
///
/// # Safety
/// `handle` must be null or live; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn sd_result_num_steps(handle: *const SdProtocolResult, out: *mut u32) -> SdStatus {
    if out.is_null() {
        return SdStatus::NullPointer;
    }
    with_result(handle, |r| {
        *out = r.per_step.len() as u32;
        SdStatus::Ok
    })
}

/// Probability of step `k` (zero-based) given that the earlier steps
/// succeeded.
///
/// # Safety
/// `handle` must be null or live; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn sd_result_step_probability(
    handle: *const SdProtocolResult,
    k: u32,
    out: *mut f64,
) -> SdStatus {
    if out.is_null() {
        return SdStatus::NullPointer;
    }
    with_result(handle, |r| match r.per_step.get(k as usize) {
        Some(step) => {
            *out = step.step_prob;
            SdStatus::Ok
        }
        None => SdStatus::OutOfRange,
    })
}

/// Concurrence after `k` steps, `0 <= k <= n`.
///
/// # Safety
/// `handle` must be null or live; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn sd_result_concurrence(
    handle: *const SdProtocolResult,
    k: u32,
    out: *mut f64,
) -> SdStatus {
    if out.is_null() {
        return SdStatus::NullPointer;
    }
    with_result(handle, |r| match r.concurrence_series.get(k as usize) {
        Some(&c) => {
            *out = c;
            SdStatus::Ok
        }
        None => SdStatus::OutOfRange,
    })
}

/// Concurrence of the final state.
///
/// # Safety
/// `handle` must be null or live; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn sd_result_final_concurrence(handle: *const SdProtocolResult, out: *mut f64) -> SdStatus {
    if out.is_null() {
        return SdStatus::NullPointer;
    }
    with_result(handle, |r| {
        *out = r.final_concurrence();
        SdStatus::Ok
    })
}

/// Final 4×4 state, row-major, split into real and imaginary parts.
///
/// # Safety
/// `handle` must be null or live; `re` and `im` must be null or each
/// writable for 16 doubles.
#[no_mangle]
pub unsafe extern "C" fn sd_result_final_state(
    handle: *const SdProtocolResult,
    re: *mut f64,
    im: *mut f64,
) -> SdStatus {
    if re.is_null() || im.is_null() {
        return SdStatus::NullPointer;
    }
    with_result(handle, |r| {
        let m = r.final_state.entries();
        for k in 0..16 {
            let z = m[(k / 4, k % 4)];
            *re.add(k) = z.re;
            *im.add(k) = z.im;
        }
        SdStatus::Ok
    })
}

/// Wootters concurrence of a row-major 4×4 density matrix.
///
/// # Safety
/// `re` and `im` must be null or each readable for 16 doubles; `out` must be
/// null or writable.
#[no_mangle]
pub unsafe extern "C" fn sd_concurrence(re: *const f64, im: *const f64, out: *mut f64) -> SdStatus {
    if re.is_null() || im.is_null() || out.is_null() {
        return SdStatus::NullPointer;
    }
    guard(|| {
        let m = Matrix4::from_fn(|i, j| Complex64::new(*re.add(4 * i + j), *im.add(4 * i + j)));
        match measures::concurrence(&DensityMatrix4::computational(m)) {
            Ok(c) => {
                *out = c;
                SdStatus::Ok
            }
            Err(e) => (&e).into(),
        }
    })
}

/// Initial and asymptotic figures of merit for one pair.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn sd_summarize(a: f64, b: f64, c_re: f64, c_im: f64, out: *mut SdSummary) -> SdStatus {
    if out.is_null() {
        return SdStatus::NullPointer;
    }
    guard(|| match make_pair_state(a, b, Complex64::new(c_re, c_im)) {
        Ok(pair) => {
            let s = summarize(&pair);
            *out = SdSummary {
                initial_concurrence: s.initial_concurrence,
                asymptotic_concurrence: s.asymptotic_concurrence.unwrap_or(f64::NAN),
                asymptotic_probability: s.asymptotic_probability,
                gain: s.gain.unwrap_or(f64::NAN),
                distillable: s.distillable,
            };
            SdStatus::Ok
        }
        Err(e) => (&e).into(),
    })
}

const MESSAGES: [&[u8]; 12] = [
    b"ok\0",
    b"null pointer argument\0",
    b"a + b differs from 1\0",
    b"negative diagonal weight\0",
    b"|c|^2 exceeds a*b\0",
    b"non-finite parameter\0",
    b"unknown statistics code\0",
    b"step count exceeds the maximum\0",
    b"step probability vanished\0",
    b"matrix is not a valid density matrix\0",
    b"index out of range\0",
    b"internal error\0",
];

/// Static, NUL-terminated description of a status code. Takes the raw
/// integer so that out-of-range values from C stay well defined.
#[no_mangle]
pub extern "C" fn sd_status_message(status: c_int) -> *const c_char {
    let text: &'static [u8] = usize::try_from(status)
        .ok()
        .and_then(|i| MESSAGES.get(i).copied())
        .unwrap_or(b"unknown status\0");
    text.as_ptr().cast()
}
