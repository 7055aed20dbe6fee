//! C ABI for the tailfit library.
//!
//! Conventions:
//!
//! - Handles (`TfSample`, `TfFit`) are opaque pointers created and freed by
//!   this library; free functions accept NULL.
//! - Every fallible call returns a [`TfStatus`]; results travel through out
//!   parameters that are written only on `TF_STATUS_OK`.
//! - After a non-OK status, [`tf_last_error_message`] returns a
//!   thread-local, NUL-terminated description valid until the next failing
//!   call on the same thread.
//! - Fits retain the data they were computed on, so the goodness-of-fit
//!   entry points need only the fit handle plus a seed.
//!
//! The matching header `include/tailfit.h` is generated by cbindgen at
//! build time and committed.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CString};

use tailfit::distributions::{cdf, quantile, DistributionModel};
use tailfit::error::Error;
use tailfit::estimation::{
    fit_block_maxima, fit_gev, fit_lognormal, fit_pot, FitResult, ThresholdChoice,
};
use tailfit::extremes::{exceedances, BlockSpec, Sample};
use tailfit::gof::{ad_test, chi_square_test, ks_test, BinSpec, GofResult, PValueMethod};
use tailfit::numerics::SeededRng;

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// An argument violated a precondition (bad range, wrong family).
    InvalidArgument = 2,
    /// The data cannot support the computation.
    DataError = 3,
}

/// Distribution family of a fit.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfFamily {
    Lognormal = 0,
    Gev = 1,
    Gpd = 2,
}

/// Parameter selector for [`tf_fit_param`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfParam {
    /// GEV or GPD shape.
    Shape = 0,
    /// GEV location.
    Location = 1,
    /// GEV or GPD scale.
    Scale = 2,
    /// Lognormal log-scale location.
    Mu = 3,
    /// Lognormal log-scale dispersion.
    Sigma = 4,
}

/// Flat result of one goodness-of-fit test.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TfGofResult {
    pub statistic: f64,
    pub p_value: f64,
    /// 1 iff p_value < alpha.
    pub reject: c_int,
    pub alpha: f64,
    /// 0 when the p-value is asymptotic.
    pub bootstrap_reps: usize,
    /// Bootstrap replicates that had to be redrawn.
    pub refit_retries: u32,
}

/// Opaque validated positive series.
pub struct TfSample {
    inner: Sample,
}

/// Opaque fit: the model, its bookkeeping, and the data it was fitted on.
pub struct TfFit {
    fit: FitResult,
    data: Vec<f64>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn fail(status: TfStatus, message: impl Into<String>) -> TfStatus {
    let text = CString::new(message.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = text);
    status
}

fn fail_error(e: Error) -> TfStatus {
    let status = match e {
        Error::InvalidArgument(_) | Error::Domain(_) => TfStatus::InvalidArgument,
        Error::Data(_) | Error::Parse { .. } | Error::Io { .. } => TfStatus::DataError,
    };
    fail(status, e.to_string())
}

/// Message describing the most recent failure on this thread. Never NULL;
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Build a sample from `len` values at `values`. All values must be finite
/// and strictly positive.
///
/// # Safety
/// `values` must point to `len` readable doubles; `out` must be a valid
/// pointer to a `TfSample*`.
#[no_mangle]
pub unsafe extern "C" fn tf_sample_new(
    values: *const f64,
    len: usize,
    out: *mut *mut TfSample,
) -> TfStatus {
    if values.is_null() || out.is_null() {
        return fail(TfStatus::NullPointer, "values/out must not be NULL");
    }
    let slice = std::slice::from_raw_parts(values, len);
    match Sample::new(slice.to_vec(), "ffi") {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(TfSample { inner }));
            TfStatus::Ok
        }
        Err(e) => fail_error(e),
    }
}

/// Number of observations in a sample; 0 for NULL.
///
/// # Safety
/// `sample` must be NULL or a live pointer from [`tf_sample_new`].
#[no_mangle]
pub unsafe extern "C" fn tf_sample_len(sample: *const TfSample) -> usize {
    if sample.is_null() {
        0
    } else {
        (*sample).inner.len()
    }
}

/// # Safety
/// `sample` must be NULL or an owned pointer from [`tf_sample_new`], not
/// freed before.
#[no_mangle]
pub unsafe extern "C" fn tf_sample_free(sample: *mut TfSample) {
    if !sample.is_null() {
        drop(Box::from_raw(sample));
    }
}

unsafe fn put_fit(out: *mut *mut TfFit, fit: FitResult, data: Vec<f64>) -> TfStatus {
    *out = Box::into_raw(Box::new(TfFit { fit, data }));
    TfStatus::Ok
}

/// Closed-form Lognormal MLE on the full sample.
///
/// # Safety
/// `sample` must be a live pointer from [`tf_sample_new`]; `out` must be a
/// valid pointer to a `TfFit*`.
#[no_mangle]
pub unsafe extern "C" fn tf_fit_lognormal(
    sample: *const TfSample,
    out: *mut *mut TfFit,
) -> TfStatus {
    if sample.is_null() || out.is_null() {
        return fail(TfStatus::NullPointer, "sample/out must not be NULL");
    }
    let values = (*sample).inner.values();
    match fit_lognormal(values) {
        Ok(fit) => put_fit(out, fit, values.to_vec()),
        Err(e) => fail_error(e),
    }
}

/// Three-parameter GEV MLE on the full sample.
///
/// # Safety
/// Same contract as [`tf_fit_lognormal`].
#[no_mangle]
pub unsafe extern "C" fn tf_fit_gev(sample: *const TfSample, out: *mut *mut TfFit) -> TfStatus {
    if sample.is_null() || out.is_null() {
        return fail(TfStatus::NullPointer, "sample/out must not be NULL");
    }
    let values = (*sample).inner.values();
    match fit_gev(values) {
        Ok(fit) => put_fit(out, fit, values.to_vec()),
        Err(e) => fail_error(e),
    }
}

/// Block-maxima GEV pipeline with contiguous blocks.
///
/// # Safety
/// Same contract as [`tf_fit_lognormal`].
#[no_mangle]
pub unsafe extern "C" fn tf_fit_block_maxima(
    sample: *const TfSample,
    block_count: usize,
    out: *mut *mut TfFit,
) -> TfStatus {
    if sample.is_null() || out.is_null() {
        return fail(TfStatus::NullPointer, "sample/out must not be NULL");
    }
    let s = &(*sample).inner;
    let spec = BlockSpec::contiguous(block_count);
    let maxima = match tailfit::extremes::block_maxima(s, &spec) {
        Ok(m) => m,
        Err(e) => return fail_error(e),
    };
    match fit_block_maxima(s, &spec) {
        Ok(fit) => put_fit(out, fit, maxima.values().to_vec()),
        Err(e) => fail_error(e),
    }
}

/// Peak-over-threshold GPD fit. `auto_threshold != 0` selects the
/// threshold from the Hill plot; otherwise `threshold` is used as given.
/// The fit retains the exceedances, so tests run against the right data.
///
/// # Safety
/// Same contract as [`tf_fit_lognormal`].
#[no_mangle]
pub unsafe extern "C" fn tf_fit_pot(
    sample: *const TfSample,
    threshold: f64,
    auto_threshold: c_int,
    out: *mut *mut TfFit,
) -> TfStatus {
    if sample.is_null() || out.is_null() {
        return fail(TfStatus::NullPointer, "sample/out must not be NULL");
    }
    let s = &(*sample).inner;
    let choice = if auto_threshold != 0 {
        ThresholdChoice::Auto
    } else {
        ThresholdChoice::Fixed(threshold)
    };
    match fit_pot(s, choice) {
        Ok(fit) => {
            let u = fit.threshold.expect("POT fit records its threshold");
            match exceedances(s, u) {
                Ok(set) => put_fit(out, fit, set.exceedances),
                Err(e) => fail_error(e),
            }
        }
        Err(e) => fail_error(e),
    }
}

/// # Safety
/// `fit` must be NULL or an owned pointer from a fit constructor, not
/// freed before.
#[no_mangle]
pub unsafe extern "C" fn tf_fit_free(fit: *mut TfFit) {
    if !fit.is_null() {
        drop(Box::from_raw(fit));
    }
}

/// Family of a fitted model; -1 for NULL.
///
/// # Safety
/// `fit` must be NULL or a live fit pointer.
#[no_mangle]
pub unsafe extern "C" fn tf_fit_family(fit: *const TfFit) -> c_int {
    if fit.is_null() {
        return -1;
    }
    match (*fit).fit.model {
        DistributionModel::Lognormal(_) => TfFamily::Lognormal as c_int,
        DistributionModel::Gev(_) => TfFamily::Gev as c_int,
        DistributionModel::Gpd(_) => TfFamily::Gpd as c_int,
    }
}

/// Fetch one fitted parameter. Requesting a parameter the family does not
/// have is an invalid-argument error.
///
/// # Safety
/// `fit` must be a live fit pointer; `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn tf_fit_param(
    fit: *const TfFit,
    which: TfParam,
    out: *mut f64,
) -> TfStatus {
    if fit.is_null() || out.is_null() {
        return fail(TfStatus::NullPointer, "fit/out must not be NULL");
    }
    let value = match ((*fit).fit.model, which) {
        (DistributionModel::Gev(p), TfParam::Shape) => p.shape,
        (DistributionModel::Gev(p), TfParam::Location) => p.location,
        (DistributionModel::Gev(p), TfParam::Scale) => p.scale,
        (DistributionModel::Gpd(p), TfParam::Shape) => p.shape,
        (DistributionModel::Gpd(p), TfParam::Scale) => p.scale,
        (DistributionModel::Lognormal(p), TfParam::Mu) => p.mu,
        (DistributionModel::Lognormal(p), TfParam::Sigma) => p.sigma,
        (model, which) => {
            return fail(
                TfStatus::InvalidArgument,
                format!("{} has no parameter {which:?}", model.family_name()),
            )
        }
    };
    *out = value;
    TfStatus::Ok
}

/// Log-likelihood of the fit on the data it used.
///
/// # Safety
/// `fit` must be a live fit pointer; `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn tf_fit_log_likelihood(fit: *const TfFit, out: *mut f64) -> TfStatus {
    if fit.is_null() || out.is_null() {
        return fail(TfStatus::NullPointer, "fit/out must not be NULL");
    }
    *out = (*fit).fit.log_likelihood;
    TfStatus::Ok
}

/// Number of observations the fit used (blocks, exceedances or full n);
/// 0 for NULL.
///
/// # Safety
/// `fit` must be NULL or a live fit pointer.
#[no_mangle]
pub unsafe extern "C" fn tf_fit_n_used(fit: *const TfFit) -> usize {
    if fit.is_null() {
        0
    } else {
        (*fit).fit.n_used
    }
}

/// 1 when the optimizer converged, 0 otherwise; -1 for NULL.
///
/// # Safety
/// `fit` must be NULL or a live fit pointer.
#[no_mangle]
pub unsafe extern "C" fn tf_fit_converged(fit: *const TfFit) -> c_int {
    if fit.is_null() {
        -1
    } else {
        c_int::from((*fit).fit.converged)
    }
}

/// Resolved POT threshold. Fails with a data error for non-POT fits.
///
/// # Safety
/// `fit` must be a live fit pointer; `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn tf_fit_threshold(fit: *const TfFit, out: *mut f64) -> TfStatus {
    if fit.is_null() || out.is_null() {
        return fail(TfStatus::NullPointer, "fit/out must not be NULL");
    }
    match (*fit).fit.threshold {
        Some(u) => {
            *out = u;
            TfStatus::Ok
        }
        None => fail(TfStatus::DataError, "fit has no threshold metadata"),
    }
}

/// CDF of the fitted model at x.
///
/// # Safety
/// `fit` must be a live fit pointer; `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn tf_fit_cdf(fit: *const TfFit, x: f64, out: *mut f64) -> TfStatus {
    if fit.is_null() || out.is_null() {
        return fail(TfStatus::NullPointer, "fit/out must not be NULL");
    }
    *out = cdf(&(*fit).fit.model, x);
    TfStatus::Ok
}

/// Quantile of the fitted model at p in (0, 1).
///
/// # Safety
/// `fit` must be a live fit pointer; `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn tf_fit_quantile(fit: *const TfFit, p: f64, out: *mut f64) -> TfStatus {
    if fit.is_null() || out.is_null() {
        return fail(TfStatus::NullPointer, "fit/out must not be NULL");
    }
    match quantile(&(*fit).fit.model, p) {
        Ok(x) => {
            *out = x;
            TfStatus::Ok
        }
        Err(e) => fail_error(e),
    }
}

fn flatten(result: GofResult) -> TfGofResult {
    TfGofResult {
        statistic: result.statistic,
        p_value: result.p_value,
        reject: c_int::from(result.reject),
        alpha: result.alpha,
        bootstrap_reps: result.bootstrap_reps,
        refit_retries: result.refit_retries,
    }
}

/// Kolmogorov-Smirnov test of the fit against the data it used.
/// `bootstrap != 0` uses the parametric bootstrap with `reps` replicates
/// seeded by `seed`; otherwise the asymptotic p-value.
///
/// # Safety
/// `fit` must be a live fit pointer; `out` must point to a writable
/// `TfGofResult`.
#[no_mangle]
pub unsafe extern "C" fn tf_ks_test(
    fit: *const TfFit,
    alpha: f64,
    bootstrap: c_int,
    reps: usize,
    seed: u64,
    out: *mut TfGofResult,
) -> TfStatus {
    if fit.is_null() || out.is_null() {
        return fail(TfStatus::NullPointer, "fit/out must not be NULL");
    }
    let f = &*fit;
    let method = if bootstrap != 0 {
        PValueMethod::Bootstrap
    } else {
        PValueMethod::Asymptotic
    };
    let rng = SeededRng::new(seed, 0);
    match ks_test(&f.data, &f.fit.model, alpha, method, reps, &rng) {
        Ok(r) => {
            *out = flatten(r);
            TfStatus::Ok
        }
        Err(e) => fail_error(e),
    }
}

/// Chi-square test on equiprobable bins (`bins = 0` selects automatically).
///
/// # Safety
/// Same contract as [`tf_ks_test`].
#[no_mangle]
pub unsafe extern "C" fn tf_chi_square_test(
    fit: *const TfFit,
    alpha: f64,
    bins: usize,
    bootstrap: c_int,
    reps: usize,
    seed: u64,
    out: *mut TfGofResult,
) -> TfStatus {
    if fit.is_null() || out.is_null() {
        return fail(TfStatus::NullPointer, "fit/out must not be NULL");
    }
    let f = &*fit;
    let spec = if bins == 0 {
        BinSpec::Auto
    } else {
        BinSpec::Count(bins)
    };
    let method = if bootstrap != 0 {
        PValueMethod::Bootstrap
    } else {
        PValueMethod::Asymptotic
    };
    let rng = SeededRng::new(seed, 0);
    match chi_square_test(
        &f.data,
        &f.fit.model,
        alpha,
        spec,
        f.fit.model.param_count(),
        method,
        reps,
        &rng,
    ) {
        Ok(r) => {
            *out = flatten(r);
            TfStatus::Ok
        }
        Err(e) => fail_error(e),
    }
}

/// Anderson-Darling test; the p-value is always a parametric bootstrap.
///
/// # Safety
/// Same contract as [`tf_ks_test`].
#[no_mangle]
pub unsafe extern "C" fn tf_ad_test(
    fit: *const TfFit,
    alpha: f64,
    reps: usize,
    seed: u64,
    out: *mut TfGofResult,
) -> TfStatus {
    if fit.is_null() || out.is_null() {
        return fail(TfStatus::NullPointer, "fit/out must not be NULL");
    }
    let f = &*fit;
    let rng = SeededRng::new(seed, 0);
    match ad_test(&f.data, &f.fit.model, alpha, reps, &rng) {
        Ok(r) => {
            *out = flatten(r);
            TfStatus::Ok
        }
        Err(e) => fail_error(e),
    }
}
