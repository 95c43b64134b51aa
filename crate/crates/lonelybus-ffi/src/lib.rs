//! C ABI for the lonelybus library.
//!
//! Conventions:
//! - Every fallible function returns [`LbStatus`]; `LB_STATUS_OK` (0) means
//!   success. On failure a message is stored per thread and can be read with
//!   [`lb_last_error_message`].
//! - Heavy objects (distributions, verification reports) live behind opaque
//!   handles allocated by `_new`/`_verify_` functions and released by the
//!   matching `_free` function exactly once.
//! - Exact rationals cross the boundary as `"numerator/denominator"`
//!   strings allocated by Rust; release them with [`lb_string_free`].
//!
//! # Safety (blanket contract)
//!
//! All `unsafe extern "C"` functions share the same requirements: pointer
//! arguments must be null or valid for the access the function performs,
//! handles must originate from this library and must not be used after
//! being freed, and returned strings must be freed exactly once via
//! [`lb_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::ptr;

use lonelybus::verify::EnumOptions;
use lonelybus::{dist, mc, prob, verify, Error, LonelyPmf, Params, VerificationReport};

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let stored = CString::new(message)
        .unwrap_or_else(|_| CString::new("error message held interior NUL").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(stored));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

/// Status code returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LbStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A parameter was outside its documented range.
    InvalidArgument = 2,
    /// The instance would enumerate more configurations than the cap.
    CapExceeded = 3,
    /// An index argument was out of bounds for the handle.
    IndexOutOfRange = 4,
}

fn status_of(err: &Error) -> LbStatus {
    match err {
        Error::InvalidInput(_) | Error::Contract(_) => LbStatus::InvalidArgument,
        Error::CapExceeded { .. } => LbStatus::CapExceeded,
    }
}

fn fail(err: &Error) -> LbStatus {
    set_last_error(err.to_string());
    status_of(err)
}

fn fail_msg(status: LbStatus, message: &str) -> LbStatus {
    set_last_error(message.to_string());
    status
}

fn string_out(out: *mut *mut c_char, value: String) -> LbStatus {
    if out.is_null() {
        return fail_msg(LbStatus::NullPointer, "output pointer is null");
    }
    match CString::new(value) {
        Ok(s) => {
            unsafe { *out = s.into_raw() };
            clear_last_error();
            LbStatus::Ok
        }
        Err(_) => fail_msg(LbStatus::InvalidArgument, "value held interior NUL"),
    }
}

/// Message describing the most recent failure on the calling thread, or
/// null when the last call succeeded. The pointer stays valid until the
/// next lonelybus call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn lb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(ptr::null(), |s| s.as_ptr())
    })
}

/// Frees a string returned by this library. Null is a no-op.
///
/// # Safety
///
/// `s` must be a pointer previously returned by a lonelybus function and
/// not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---------------------------------------------------------------------------
// Exact distribution
// ---------------------------------------------------------------------------

/// Opaque handle to an exact lonely-count distribution.
pub struct LbPmf {
    inner: LonelyPmf,
}

/// Computes the exact distribution for `n` passengers on `k` buses and
/// stores a handle in `*out`.
///
/// # Safety
///
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn lb_pmf_new(n: u32, k: u32, out: *mut *mut LbPmf) -> LbStatus {
    if out.is_null() {
        return fail_msg(LbStatus::NullPointer, "output pointer is null");
    }
    match Params::new(n, k) {
        Ok(params) => {
            let handle = Box::new(LbPmf {
                inner: dist::exact_pmf(&params),
            });
            *out = Box::into_raw(handle);
            clear_last_error();
            LbStatus::Ok
        }
        Err(err) => fail(&err),
    }
}

/// Releases a distribution handle. Null is a no-op.
///
/// # Safety
///
/// `pmf` must come from [`lb_pmf_new`] and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lb_pmf_free(pmf: *mut LbPmf) {
    if !pmf.is_null() {
        drop(Box::from_raw(pmf));
    }
}

/// Passenger count of the distribution, or 0 when `pmf` is null.
///
/// # Safety
///
/// `pmf` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn lb_pmf_n(pmf: *const LbPmf) -> u32 {
    pmf.as_ref().map_or(0, |p| p.inner.n())
}

/// Bus count of the distribution, or 0 when `pmf` is null.
///
/// # Safety
///
/// `pmf` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn lb_pmf_k(pmf: *const LbPmf) -> u32 {
    pmf.as_ref().map_or(0, |p| p.inner.k())
}

/// Writes `P(L = s)` as a freshly allocated `"p/q"` string into `*out`.
///
/// # Safety
///
/// `pmf` must be a live handle; `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn lb_pmf_mass_rational(
    pmf: *const LbPmf,
    s: u32,
    out: *mut *mut c_char,
) -> LbStatus {
    let Some(handle) = pmf.as_ref() else {
        return fail_msg(LbStatus::NullPointer, "pmf handle is null");
    };
    string_out(out, handle.inner.mass(s).to_string())
}

/// Writes `P(L = s)` as a decimal approximation into `*out`.
///
/// # Safety
///
/// `pmf` must be a live handle; `out` must be valid for writing one double.
#[no_mangle]
pub unsafe extern "C" fn lb_pmf_mass_decimal(
    pmf: *const LbPmf,
    s: u32,
    out: *mut f64,
) -> LbStatus {
    let Some(handle) = pmf.as_ref() else {
        return fail_msg(LbStatus::NullPointer, "pmf handle is null");
    };
    if out.is_null() {
        return fail_msg(LbStatus::NullPointer, "output pointer is null");
    }
    *out = handle.inner.mass(s).to_f64();
    clear_last_error();
    LbStatus::Ok
}

/// Writes `P(L >= r)` as a freshly allocated `"p/q"` string into `*out`.
///
/// # Safety
///
/// `pmf` must be a live handle; `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn lb_pmf_tail_rational(
    pmf: *const LbPmf,
    r: u32,
    out: *mut *mut c_char,
) -> LbStatus {
    let Some(handle) = pmf.as_ref() else {
        return fail_msg(LbStatus::NullPointer, "pmf handle is null");
    };
    if r < 1 || r > handle.inner.n() {
        return fail_msg(
            LbStatus::InvalidArgument,
            "threshold r must lie in 1..=n",
        );
    }
    string_out(out, handle.inner.tail(r).to_string())
}

/// One-shot tail probability `P(L >= r)` as a `"p/q"` string.
///
/// # Safety
///
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn lb_tail_prob_rational(
    n: u32,
    k: u32,
    r: u32,
    out: *mut *mut c_char,
) -> LbStatus {
    let result = Params::new(n, k).and_then(|params| dist::tail_prob(&params, r));
    match result {
        Ok(tail) => string_out(out, tail.to_string()),
        Err(err) => fail(&err),
    }
}

/// Exact expected lonely count `n * (1 - 1/k)^(n-1)` as a `"p/q"` string.
///
/// # Safety
///
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn lb_expected_lonely_rational(
    n: u32,
    k: u32,
    out: *mut *mut c_char,
) -> LbStatus {
    match Params::new(n, k) {
        Ok(params) => string_out(out, prob::ratio_string(&dist::expected_lonely(&params))),
        Err(err) => fail(&err),
    }
}

// ---------------------------------------------------------------------------
// Exhaustive verification
// ---------------------------------------------------------------------------

/// Opaque handle to an exact verification report.
pub struct LbReport {
    inner: VerificationReport,
}

unsafe fn report_out(
    result: Result<VerificationReport, Error>,
    out: *mut *mut LbReport,
) -> LbStatus {
    if out.is_null() {
        return fail_msg(LbStatus::NullPointer, "output pointer is null");
    }
    match result {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(LbReport { inner }));
            clear_last_error();
            LbStatus::Ok
        }
        Err(err) => fail(&err),
    }
}

/// Exhaustively verifies the existence theorem at `(n, k)` and stores a
/// report handle in `*out`. `max_enum` caps the enumeration size; pass 0
/// for the default of 10^8. `workers` may be 0 for single-threaded.
///
/// # Safety
///
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn lb_verify_theorem1(
    n: u32,
    k: u32,
    max_enum: u64,
    workers: u32,
    out: *mut *mut LbReport,
) -> LbStatus {
    let opts = EnumOptions {
        max_configurations: if max_enum == 0 {
            EnumOptions::default().max_configurations
        } else {
            max_enum
        },
        workers: workers.max(1) as usize,
    };
    let result = Params::new(n, k).and_then(|params| verify::verify_theorem1(&params, &opts));
    report_out(result, out)
}

/// Exhaustively verifies the dominance theorem at `(n, k)` and threshold
/// `r` (in `2..=n`), storing a report handle in `*out`. See
/// [`lb_verify_theorem1`] for `max_enum` and `workers`.
///
/// # Safety
///
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn lb_verify_theorem2(
    n: u32,
    k: u32,
    r: u32,
    max_enum: u64,
    workers: u32,
    out: *mut *mut LbReport,
) -> LbStatus {
    let opts = EnumOptions {
        max_configurations: if max_enum == 0 {
            EnumOptions::default().max_configurations
        } else {
            max_enum
        },
        workers: workers.max(1) as usize,
    };
    let result = Params::new(n, k).and_then(|params| verify::verify_theorem2(&params, r, &opts));
    report_out(result, out)
}

/// Releases a report handle. Null is a no-op.
///
/// # Safety
///
/// `report` must come from a verify call and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lb_report_free(report: *mut LbReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// True iff every claim in the report holds. Null reports as false.
///
/// # Safety
///
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn lb_report_all_pass(report: *const LbReport) -> bool {
    report.as_ref().is_some_and(|r| r.inner.all_pass())
}

/// Number of claims in the report; 0 when `report` is null.
///
/// # Safety
///
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn lb_report_claim_count(report: *const LbReport) -> usize {
    report.as_ref().map_or(0, |r| r.inner.claims.len())
}

unsafe fn claim_at<'a>(
    report: *const LbReport,
    index: usize,
) -> Result<&'a verify::Claim, LbStatus> {
    let Some(handle) = report.as_ref() else {
        return Err(fail_msg(LbStatus::NullPointer, "report handle is null"));
    };
    handle.inner.claims.get(index).ok_or_else(|| {
        fail_msg(
            LbStatus::IndexOutOfRange,
            "claim index is out of range for this report",
        )
    })
}

/// Writes the claim's stable name into `*out` as a fresh string.
///
/// # Safety
///
/// `report` must be a live handle; `out` must be valid for one pointer.
#[no_mangle]
pub unsafe extern "C" fn lb_report_claim_name(
    report: *const LbReport,
    index: usize,
    out: *mut *mut c_char,
) -> LbStatus {
    match claim_at(report, index) {
        Ok(claim) => string_out(out, claim.name.clone()),
        Err(status) => status,
    }
}

/// Writes whether the claim holds into `*out`.
///
/// # Safety
///
/// `report` must be a live handle; `out` must be valid for one bool.
#[no_mangle]
pub unsafe extern "C" fn lb_report_claim_holds(
    report: *const LbReport,
    index: usize,
    out: *mut bool,
) -> LbStatus {
    if out.is_null() {
        return fail_msg(LbStatus::NullPointer, "output pointer is null");
    }
    match claim_at(report, index) {
        Ok(claim) => {
            *out = claim.holds;
            clear_last_error();
            LbStatus::Ok
        }
        Err(status) => status,
    }
}

/// Writes the claim's exact left-hand side as a `"p/q"` string into `*out`.
///
/// # Safety
///
/// `report` must be a live handle; `out` must be valid for one pointer.
#[no_mangle]
pub unsafe extern "C" fn lb_report_claim_lhs(
    report: *const LbReport,
    index: usize,
    out: *mut *mut c_char,
) -> LbStatus {
    match claim_at(report, index) {
        Ok(claim) => string_out(out, prob::ratio_string(&claim.lhs)),
        Err(status) => status,
    }
}

/// Writes the claim's exact right-hand side as a `"p/q"` string into `*out`.
///
/// # Safety
///
/// `report` must be a live handle; `out` must be valid for one pointer.
#[no_mangle]
pub unsafe extern "C" fn lb_report_claim_rhs(
    report: *const LbReport,
    index: usize,
    out: *mut *mut c_char,
) -> LbStatus {
    match claim_at(report, index) {
        Ok(claim) => string_out(out, prob::ratio_string(&claim.rhs)),
        Err(status) => status,
    }
}

/// Writes the claim's required relation (`"<"`, `"<="`, `"="`, `">="`,
/// `">"`) into `*out` as a fresh string.
///
/// # Safety
///
/// `report` must be a live handle; `out` must be valid for one pointer.
#[no_mangle]
pub unsafe extern "C" fn lb_report_claim_relation(
    report: *const LbReport,
    index: usize,
    out: *mut *mut c_char,
) -> LbStatus {
    match claim_at(report, index) {
        Ok(claim) => string_out(out, claim.relation.symbol().to_string()),
        Err(status) => status,
    }
}

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

/// Sampled tail estimate with its 95% Wilson interval.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LbEstimate {
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub hits: u64,
    pub trials: u64,
    pub seed: u64,
    pub workers: u32,
}

/// Runs `trials` seeded allocations of `n` passengers on `k` buses and
/// writes the estimate of `P(lonely count >= r)` into `*out`. Results are
/// a pure function of `(n, k, r, trials, seed, workers)`.
///
/// # Safety
///
/// `out` must be valid for writing one `LbEstimate`.
#[no_mangle]
pub unsafe extern "C" fn lb_estimate_tail(
    n: u32,
    k: u32,
    r: u32,
    trials: u64,
    seed: u64,
    workers: u32,
    out: *mut LbEstimate,
) -> LbStatus {
    if out.is_null() {
        return fail_msg(LbStatus::NullPointer, "output pointer is null");
    }
    let result = Params::new(n, k)
        .and_then(|params| mc::estimate_tail(&params, r, trials, seed, workers.max(1) as usize));
    match result {
        Ok(est) => {
            *out = LbEstimate {
                point: est.point,
                ci_low: est.ci_low,
                ci_high: est.ci_high,
                hits: est.hits,
                trials: est.trials,
                seed: est.seed,
                workers: est.workers as u32,
            };
            clear_last_error();
            LbStatus::Ok
        }
        Err(err) => fail(&err),
    }
}
