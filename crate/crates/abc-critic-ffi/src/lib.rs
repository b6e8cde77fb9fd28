//! C ABI over the abc-critic toolkit.
//!
//! Handles are opaque boxes owned by Rust; every `*_new` has a matching
//! `*_free`, and every fallible call returns an [`AbcStatus`] with results
//! written through out-pointers. Passing a null handle or out-pointer
//! yields `AbcStatusNullPointer`, never undefined behavior on the Rust
//! side. The generated header lives at `include/abc_critic.h`.

use std::ffi::c_char;

use abc_critic::builtin::{
    binomial_error_posterior, poisson_error_posterior, poisson_evidence, BinomialUniformModel,
    LocationModel, PoissonExpModel,
};
use abc_critic::criticism::{evidence_exact_match, pvalue_tail, ErrorPosterior};
use abc_critic::error_prior::ErrorPrior;
use abc_critic::model::{Model, Observation};
use abc_critic::rng::RngStream;
use abc_critic::samplers::{abc_mu_reject, AbcRun};

/// Status code of a fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbcStatus {
    AbcStatusOk = 0,
    AbcStatusNullPointer = 1,
    AbcStatusInvalidArgument = 2,
    AbcStatusUnsupported = 3,
    AbcStatusRuntimeFailure = 4,
}

use AbcStatus::*;

/// Opaque generative-model handle.
pub struct AbcModel {
    inner: Box<dyn Model>,
}

/// Opaque error-prior handle.
pub struct AbcErrorPrior {
    inner: ErrorPrior,
}

/// Opaque error-posterior handle.
pub struct AbcPosterior {
    inner: ErrorPosterior,
}

/// Opaque sampler-run handle.
pub struct AbcRunResult {
    inner: AbcRun,
}

/// Crate version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn abc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// New Poisson model with a unit-rate exponential prior.
#[no_mangle]
pub extern "C" fn abc_model_poisson_exp_new() -> *mut AbcModel {
    Box::into_raw(Box::new(AbcModel {
        inner: Box::new(PoissonExpModel),
    }))
}

/// New Binomial model with a uniform success prior; null if `trials < 1`.
#[no_mangle]
pub extern "C" fn abc_model_binomial_new(trials: u64) -> *mut AbcModel {
    match BinomialUniformModel::new(trials) {
        Ok(model) => Box::into_raw(Box::new(AbcModel {
            inner: Box::new(model),
        })),
        Err(_) => std::ptr::null_mut(),
    }
}

/// New Gaussian location model; null unless `prior_sd > 0`.
#[no_mangle]
pub extern "C" fn abc_model_location_new(prior_mean: f64, prior_sd: f64) -> *mut AbcModel {
    match LocationModel::gaussian(prior_mean, prior_sd) {
        Ok(model) => Box::into_raw(Box::new(AbcModel {
            inner: Box::new(model),
        })),
        Err(_) => std::ptr::null_mut(),
    }
}

/// # Safety
/// `model` must be a pointer returned by an `abc_model_*_new` function
/// that has not been freed yet, or null (a no-op).
#[no_mangle]
pub unsafe extern "C" fn abc_model_free(model: *mut AbcModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// New heavy-tailed integer prior truncated at `trunc`; null if `trunc < 1`.
#[no_mangle]
pub extern "C" fn abc_prior_cauchy_new(trunc: i64) -> *mut AbcErrorPrior {
    match ErrorPrior::cauchy_integer(trunc) {
        Ok(inner) => Box::into_raw(Box::new(AbcErrorPrior { inner })),
        Err(_) => std::ptr::null_mut(),
    }
}

/// New uniform integer prior on `{-half_width, ..., half_width}`; null if
/// `half_width < 0`.
#[no_mangle]
pub extern "C" fn abc_prior_uniform_new(half_width: i64) -> *mut AbcErrorPrior {
    match ErrorPrior::uniform_integer(half_width) {
        Ok(inner) => Box::into_raw(Box::new(AbcErrorPrior { inner })),
        Err(_) => std::ptr::null_mut(),
    }
}

/// New Gaussian prior on the real line; null unless `sd > 0`.
#[no_mangle]
pub extern "C" fn abc_prior_gaussian_new(mean: f64, sd: f64) -> *mut AbcErrorPrior {
    match ErrorPrior::gaussian_real(mean, sd) {
        Ok(inner) => Box::into_raw(Box::new(AbcErrorPrior { inner })),
        Err(_) => std::ptr::null_mut(),
    }
}

/// # Safety
/// `prior` must be a pointer returned by an `abc_prior_*_new` function
/// that has not been freed yet, or null (a no-op).
#[no_mangle]
pub unsafe extern "C" fn abc_prior_free(prior: *mut AbcErrorPrior) {
    if !prior.is_null() {
        drop(Box::from_raw(prior));
    }
}

/// Evidence of the Poisson model at observed count `x0`: exactly
/// `2^-(x0+1)`.
///
/// # Safety
/// `out` must be a valid pointer to a writable f64.
#[no_mangle]
pub unsafe extern "C" fn abc_poisson_evidence(x0: i64, out: *mut f64) -> AbcStatus {
    if out.is_null() {
        return AbcStatusNullPointer;
    }
    if x0 < 0 {
        return AbcStatusInvalidArgument;
    }
    *out = poisson_evidence(x0 as u64);
    AbcStatusOk
}

/// New Poisson error posterior truncated at `trunc`; null unless
/// `0 <= x0 < trunc`.
#[no_mangle]
pub extern "C" fn abc_poisson_error_posterior_new(x0: i64, trunc: i64) -> *mut AbcPosterior {
    if x0 < 0 {
        return std::ptr::null_mut();
    }
    match poisson_error_posterior(x0 as u64, trunc) {
        Ok(inner) => Box::into_raw(Box::new(AbcPosterior { inner })),
        Err(_) => std::ptr::null_mut(),
    }
}

/// New Binomial error posterior (uniform `1/(2*trials+1)`); null unless
/// `0 <= x0 <= trials` and `trials >= 1`.
#[no_mangle]
pub extern "C" fn abc_binomial_error_posterior_new(trials: i64, x0: i64) -> *mut AbcPosterior {
    if trials < 1 || x0 < 0 {
        return std::ptr::null_mut();
    }
    match binomial_error_posterior(trials as u64, x0 as u64) {
        Ok(inner) => Box::into_raw(Box::new(AbcPosterior { inner })),
        Err(_) => std::ptr::null_mut(),
    }
}

/// Posterior mass at lattice point `k` (zero off support).
///
/// # Safety
/// `post` must be a live posterior handle; `out` a writable f64 pointer.
#[no_mangle]
pub unsafe extern "C" fn abc_posterior_pmf(
    post: *const AbcPosterior,
    k: i64,
    out: *mut f64,
) -> AbcStatus {
    let Some(post) = post.as_ref() else {
        return AbcStatusNullPointer;
    };
    if out.is_null() {
        return AbcStatusNullPointer;
    }
    *out = post.inner.pmf(k);
    AbcStatusOk
}

/// Tail-area p-value of the posterior (inclusive tie rule).
///
/// # Safety
/// `post` must be a live posterior handle; `out` a writable f64 pointer.
#[no_mangle]
pub unsafe extern "C" fn abc_posterior_pvalue_tail(
    post: *const AbcPosterior,
    out: *mut f64,
) -> AbcStatus {
    let Some(post) = post.as_ref() else {
        return AbcStatusNullPointer;
    };
    if out.is_null() {
        return AbcStatusNullPointer;
    }
    match pvalue_tail(&post.inner) {
        Ok(p) => {
            *out = p;
            AbcStatusOk
        }
        Err(_) => AbcStatusInvalidArgument,
    }
}

/// Upper bound on the probability mass lost to truncation.
///
/// # Safety
/// `post` must be a live posterior handle; `out` a writable f64 pointer.
#[no_mangle]
pub unsafe extern "C" fn abc_posterior_tail_bound(
    post: *const AbcPosterior,
    out: *mut f64,
) -> AbcStatus {
    let Some(post) = post.as_ref() else {
        return AbcStatusNullPointer;
    };
    if out.is_null() {
        return AbcStatusNullPointer;
    }
    *out = post.inner.tail_bound();
    AbcStatusOk
}

/// # Safety
/// `post` must be a pointer returned by an `abc_*_posterior_new` function
/// that has not been freed yet, or null (a no-op).
#[no_mangle]
pub unsafe extern "C" fn abc_posterior_free(post: *mut AbcPosterior) {
    if !post.is_null() {
        drop(Box::from_raw(post));
    }
}

/// Evidence from the exact-match acceptance rate on a discrete model.
/// The observation is a dataset holding the single value `x0`.
///
/// # Safety
/// `model` must be a live model handle; `out_value` and `out_std_error`
/// must be writable f64 pointers.
#[no_mangle]
pub unsafe extern "C" fn abc_evidence_exact_match(
    model: *const AbcModel,
    x0: f64,
    proposals: u64,
    seed: u64,
    out_value: *mut f64,
    out_std_error: *mut f64,
) -> AbcStatus {
    let Some(model) = model.as_ref() else {
        return AbcStatusNullPointer;
    };
    if out_value.is_null() || out_std_error.is_null() {
        return AbcStatusNullPointer;
    }
    if proposals == 0 {
        return AbcStatusInvalidArgument;
    }
    let obs = Observation::from_data(model.inner.as_ref(), vec![x0]);
    let rng = RngStream::from_seed(seed);
    match evidence_exact_match(model.inner.as_ref(), &obs, proposals, &rng) {
        Ok(est) => {
            *out_value = est.value;
            *out_std_error = est.std_error;
            AbcStatusOk
        }
        Err(abc_critic::criticism::CriticismError::ContinuousModelUnsupported) => {
            AbcStatusUnsupported
        }
        Err(_) => AbcStatusRuntimeFailure,
    }
}

/// Error-augmented exact-match rejection run; the accepted pairs follow
/// the joint error-and-parameter posterior.
///
/// # Safety
/// `model` and `prior` must be live handles; `out_run` must be a writable
/// pointer slot that receives the new run handle on success.
#[no_mangle]
pub unsafe extern "C" fn abc_run_mu_reject(
    model: *const AbcModel,
    prior: *const AbcErrorPrior,
    x0: f64,
    proposals: u64,
    seed: u64,
    out_run: *mut *mut AbcRunResult,
) -> AbcStatus {
    let Some(model) = model.as_ref() else {
        return AbcStatusNullPointer;
    };
    let Some(prior) = prior.as_ref() else {
        return AbcStatusNullPointer;
    };
    if out_run.is_null() {
        return AbcStatusNullPointer;
    }
    if proposals == 0 {
        return AbcStatusInvalidArgument;
    }
    let obs = Observation::from_data(model.inner.as_ref(), vec![x0]);
    let rng = RngStream::from_seed(seed);
    match abc_mu_reject(model.inner.as_ref(), &prior.inner, &obs, proposals, &rng) {
        Ok(run) => {
            *out_run = Box::into_raw(Box::new(AbcRunResult { inner: run }));
            AbcStatusOk
        }
        Err(abc_critic::samplers::SamplerError::ContinuousObservationSpace) => AbcStatusUnsupported,
        Err(abc_critic::samplers::SamplerError::Prior(_)) => AbcStatusInvalidArgument,
        Err(_) => AbcStatusRuntimeFailure,
    }
}

/// Number of retained draws.
///
/// # Safety
/// `run` must be a live run handle; `out` a writable u64 pointer.
#[no_mangle]
pub unsafe extern "C" fn abc_run_len(run: *const AbcRunResult, out: *mut u64) -> AbcStatus {
    let Some(run) = run.as_ref() else {
        return AbcStatusNullPointer;
    };
    if out.is_null() {
        return AbcStatusNullPointer;
    }
    *out = run.inner.accepted.len() as u64;
    AbcStatusOk
}

/// Acceptance rate of the run.
///
/// # Safety
/// `run` must be a live run handle; `out` a writable f64 pointer.
#[no_mangle]
pub unsafe extern "C" fn abc_run_acceptance_rate(
    run: *const AbcRunResult,
    out: *mut f64,
) -> AbcStatus {
    let Some(run) = run.as_ref() else {
        return AbcStatusNullPointer;
    };
    if out.is_null() {
        return AbcStatusNullPointer;
    }
    *out = run.inner.acceptance_rate();
    AbcStatusOk
}

/// Normalized error marginal over `len` lattice points starting at
/// `eps_lo`, written into `out[0..len]`.
///
/// # Safety
/// `run` must be a live run handle; `out` must point to at least `len`
/// writable f64 slots.
#[no_mangle]
pub unsafe extern "C" fn abc_run_eps_marginal(
    run: *const AbcRunResult,
    eps_lo: i64,
    len: usize,
    out: *mut f64,
) -> AbcStatus {
    let Some(run) = run.as_ref() else {
        return AbcStatusNullPointer;
    };
    if out.is_null() || len == 0 {
        return AbcStatusNullPointer;
    }
    let Ok(marginal) = run.inner.eps_marginal_lattice() else {
        return AbcStatusUnsupported;
    };
    for offset in 0..len {
        let k = eps_lo + offset as i64;
        *out.add(offset) = marginal.get(&k).copied().unwrap_or(0.0);
    }
    AbcStatusOk
}

/// # Safety
/// `run` must be a pointer returned by `abc_run_mu_reject` that has not
/// been freed yet, or null (a no-op).
#[no_mangle]
pub unsafe extern "C" fn abc_run_free(run: *mut AbcRunResult) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}
