//! Exercises the C surface through the exported extern "C" functions:
//! handle lifecycles, status codes, and numeric agreement with the
//! analytic forms.

use abc_critic_ffi::*;
use std::ffi::CStr;

#[test]
fn version_is_a_nul_terminated_string() {
    let version = unsafe { CStr::from_ptr(abc_version()) };
    assert_eq!(version.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn poisson_evidence_through_the_abi() {
    let mut out = 0.0f64;
    for (x0, expected) in [(0i64, 0.5f64), (3, 1.0 / 16.0), (10, 2f64.powi(-11))] {
        let status = unsafe { abc_poisson_evidence(x0, &mut out) };
        assert_eq!(status, AbcStatus::AbcStatusOk);
        assert_eq!(out, expected);
    }
    assert_eq!(
        unsafe { abc_poisson_evidence(-1, &mut out) },
        AbcStatus::AbcStatusInvalidArgument
    );
    assert_eq!(
        unsafe { abc_poisson_evidence(1, std::ptr::null_mut()) },
        AbcStatus::AbcStatusNullPointer
    );
}

#[test]
fn posterior_handles_expose_pmf_pvalue_and_tail_bound() {
    let post = abc_poisson_error_posterior_new(2, 200);
    assert!(!post.is_null());
    let mut pvalue = 0.0;
    assert_eq!(
        unsafe { abc_posterior_pvalue_tail(post, &mut pvalue) },
        AbcStatus::AbcStatusOk
    );
    assert_eq!(pvalue, 1.0);
    let mut at_minus_one = 0.0;
    let mut at_zero = 0.0;
    unsafe {
        abc_posterior_pmf(post, -1, &mut at_minus_one);
        abc_posterior_pmf(post, 0, &mut at_zero);
    }
    assert_eq!(at_minus_one, at_zero);
    let mut off_support = 1.0;
    unsafe { abc_posterior_pmf(post, -3, &mut off_support) };
    assert_eq!(off_support, 0.0);
    let mut tail = 0.0;
    assert_eq!(
        unsafe { abc_posterior_tail_bound(post, &mut tail) },
        AbcStatus::AbcStatusOk
    );
    assert!(tail > 0.0 && tail < 1e-55);
    unsafe { abc_posterior_free(post) };

    let flat = abc_binomial_error_posterior_new(5, 2);
    assert!(!flat.is_null());
    let mut mass = 0.0;
    unsafe { abc_posterior_pmf(flat, 3, &mut mass) };
    assert_eq!(mass, 1.0 / 11.0);
    unsafe { abc_posterior_free(flat) };

    assert!(abc_poisson_error_posterior_new(-1, 200).is_null());
    assert!(abc_poisson_error_posterior_new(5, 5).is_null());
    assert!(abc_binomial_error_posterior_new(5, 9).is_null());
}

#[test]
fn exact_match_evidence_matches_the_closed_form() {
    let model = abc_model_poisson_exp_new();
    let mut value = 0.0;
    let mut se = 0.0;
    let status =
        unsafe { abc_evidence_exact_match(model, 1.0, 200_000, 7, &mut value, &mut se) };
    assert_eq!(status, AbcStatus::AbcStatusOk);
    assert!((value - 0.25).abs() <= 3.0 * se, "value {value} se {se}");
    unsafe { abc_model_free(model) };
}

#[test]
fn continuous_models_are_refused_for_exact_match() {
    let model = abc_model_location_new(0.0, 1.0);
    assert!(!model.is_null());
    let mut value = 0.0;
    let mut se = 0.0;
    let status = unsafe { abc_evidence_exact_match(model, 0.0, 1000, 7, &mut value, &mut se) };
    assert_eq!(status, AbcStatus::AbcStatusUnsupported);
    unsafe { abc_model_free(model) };
}

#[test]
fn mu_reject_run_round_trips_through_handles() {
    let model = abc_model_poisson_exp_new();
    let prior = abc_prior_cauchy_new(200);
    assert!(!model.is_null() && !prior.is_null());

    let mut run: *mut AbcRunResult = std::ptr::null_mut();
    let status = unsafe { abc_run_mu_reject(model, prior, 2.0, 100_000, 42, &mut run) };
    assert_eq!(status, AbcStatus::AbcStatusOk);
    assert!(!run.is_null());

    let mut len = 0u64;
    let mut rate = 0.0f64;
    unsafe {
        assert_eq!(abc_run_len(run, &mut len), AbcStatus::AbcStatusOk);
        assert_eq!(abc_run_acceptance_rate(run, &mut rate), AbcStatus::AbcStatusOk);
    }
    assert!(len > 0);
    // Direct-sum acceptance probability is about 0.124 at x0 = 2.
    assert!((rate - 0.124).abs() < 0.01, "rate {rate}");

    let mut marginal = vec![0.0f64; 13];
    let status = unsafe { abc_run_eps_marginal(run, -2, marginal.len(), marginal.as_mut_ptr()) };
    assert_eq!(status, AbcStatus::AbcStatusOk);
    let total: f64 = marginal.iter().sum();
    assert!(total > 0.99, "marginal mass {total}");
    // Masses at -1 and 0 tie analytically; statistically they are close.
    assert!((marginal[1] - marginal[2]).abs() < 0.02);

    unsafe {
        abc_run_free(run);
        abc_prior_free(prior);
        abc_model_free(model);
    }
}

#[test]
fn null_handles_are_reported_not_dereferenced() {
    let mut out = 0.0f64;
    assert_eq!(
        unsafe { abc_posterior_pvalue_tail(std::ptr::null(), &mut out) },
        AbcStatus::AbcStatusNullPointer
    );
    let mut run: *mut AbcRunResult = std::ptr::null_mut();
    assert_eq!(
        unsafe { abc_run_mu_reject(std::ptr::null(), std::ptr::null(), 0.0, 10, 1, &mut run) },
        AbcStatus::AbcStatusNullPointer
    );
    unsafe {
        abc_model_free(std::ptr::null_mut());
        abc_prior_free(std::ptr::null_mut());
        abc_posterior_free(std::ptr::null_mut());
        abc_run_free(std::ptr::null_mut());
    }
}

#[test]
fn generated_header_declares_the_surface() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("include")
        .join("abc_critic.h");
    let text = std::fs::read_to_string(&header).expect("header generated at build time");
    for symbol in [
        "abc_version",
        "abc_model_poisson_exp_new",
        "abc_prior_cauchy_new",
        "abc_poisson_evidence",
        "abc_posterior_pvalue_tail",
        "abc_run_mu_reject",
        "abc_run_eps_marginal",
        "AbcStatus",
    ] {
        assert!(text.contains(symbol), "header is missing {symbol}");
    }
    assert!(text.contains("ABC_CRITIC_H"));
}
