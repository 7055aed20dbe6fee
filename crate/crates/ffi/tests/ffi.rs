//! Exercises the C ABI end to end: handle lifecycle, status codes, fit
//! accessors, goodness-of-fit determinism, and a compile-and-run smoke
//! test of the generated header with a real C compiler.

use std::ffi::CStr;
use std::os::raw::c_int;
use std::ptr;

use tailfit_ffi::*;

fn sample_from(values: &[f64]) -> *mut TfSample {
    let mut out = ptr::null_mut();
    let status = unsafe { tf_sample_new(values.as_ptr(), values.len(), &mut out) };
    assert_eq!(status, TfStatus::Ok);
    assert!(!out.is_null());
    out
}

fn premium_like_values(n: usize) -> Vec<f64> {
    use tailfit::distributions::{sample as draw, DistributionModel};
    use tailfit::numerics::SeededRng;
    let model = DistributionModel::gev(0.3, 80.0, 25.0).unwrap();
    let mut rng = SeededRng::new(99, 0);
    draw(&model, n, &mut rng)
        .into_iter()
        .map(|x| x.max(0.5))
        .collect()
}

#[test]
fn version_and_error_message_are_c_strings() {
    let v = unsafe { CStr::from_ptr(tf_version()) };
    assert!(!v.to_str().unwrap().is_empty());
    let m = unsafe { CStr::from_ptr(tf_last_error_message()) };
    assert!(m.to_str().is_ok());
}

#[test]
fn sample_lifecycle_and_validation() {
    let s = sample_from(&[1.0, 2.5, 3.0]);
    assert_eq!(unsafe { tf_sample_len(s) }, 3);
    unsafe { tf_sample_free(s) };

    let mut out = ptr::null_mut();
    let status = unsafe { tf_sample_new([1.0, -2.0].as_ptr(), 2, &mut out) };
    assert_eq!(status, TfStatus::DataError);
    assert!(out.is_null());
    let msg = unsafe { CStr::from_ptr(tf_last_error_message()) };
    assert!(msg.to_str().unwrap().contains("positive"));

    let status = unsafe { tf_sample_new(ptr::null(), 0, &mut out) };
    assert_eq!(status, TfStatus::NullPointer);

    // Freeing NULL is a no-op.
    unsafe {
        tf_sample_free(ptr::null_mut());
        tf_fit_free(ptr::null_mut());
    }
}

#[test]
fn lognormal_fit_matches_library() {
    let values = [2.0, 5.0, 3.0, 8.0, 4.0, 6.5, 3.3, 7.1];
    let s = sample_from(&values);
    let mut fit = ptr::null_mut();
    assert_eq!(unsafe { tf_fit_lognormal(s, &mut fit) }, TfStatus::Ok);
    assert_eq!(unsafe { tf_fit_family(fit) }, TfFamily::Lognormal as c_int);
    assert_eq!(unsafe { tf_fit_converged(fit) }, 1);
    assert_eq!(unsafe { tf_fit_n_used(fit) }, values.len());

    let direct = tailfit::estimation::fit_lognormal(&values).unwrap();
    let (mut mu, mut sigma, mut ll) = (0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(tf_fit_param(fit, TfParam::Mu, &mut mu), TfStatus::Ok);
        assert_eq!(tf_fit_param(fit, TfParam::Sigma, &mut sigma), TfStatus::Ok);
        assert_eq!(tf_fit_log_likelihood(fit, &mut ll), TfStatus::Ok);
    }
    if let tailfit::distributions::DistributionModel::Lognormal(p) = direct.model {
        assert_eq!(mu, p.mu);
        assert_eq!(sigma, p.sigma);
    }
    assert_eq!(ll, direct.log_likelihood);

    // Lognormal has no shape parameter.
    let mut junk = 0.0;
    assert_eq!(
        unsafe { tf_fit_param(fit, TfParam::Shape, &mut junk) },
        TfStatus::InvalidArgument
    );

    // No threshold on a direct fit.
    assert_eq!(
        unsafe { tf_fit_threshold(fit, &mut junk) },
        TfStatus::DataError
    );

    unsafe {
        tf_fit_free(fit);
        tf_sample_free(s);
    }
}

#[test]
fn pot_fit_reports_threshold_and_quantiles_invert_cdf() {
    let values = premium_like_values(200);
    let s = sample_from(&values);
    let mut fit = ptr::null_mut();
    assert_eq!(unsafe { tf_fit_pot(s, 80.0, 0, &mut fit) }, TfStatus::Ok);
    assert_eq!(unsafe { tf_fit_family(fit) }, TfFamily::Gpd as c_int);

    let mut u = 0.0;
    assert_eq!(unsafe { tf_fit_threshold(fit, &mut u) }, TfStatus::Ok);
    assert_eq!(u, 80.0);

    let (mut q, mut c) = (0.0, 0.0);
    unsafe {
        assert_eq!(tf_fit_quantile(fit, 0.9, &mut q), TfStatus::Ok);
        assert_eq!(tf_fit_cdf(fit, q, &mut c), TfStatus::Ok);
    }
    assert!((c - 0.9).abs() <= 1e-9);
    assert_eq!(
        unsafe { tf_fit_quantile(fit, 1.5, &mut q) },
        TfStatus::InvalidArgument
    );

    unsafe {
        tf_fit_free(fit);
        tf_sample_free(s);
    }
}

#[test]
fn block_maxima_fit_uses_the_maxima() {
    let values = premium_like_values(120);
    let s = sample_from(&values);
    let mut fit = ptr::null_mut();
    assert_eq!(
        unsafe { tf_fit_block_maxima(s, 12, &mut fit) },
        TfStatus::Ok
    );
    assert_eq!(unsafe { tf_fit_family(fit) }, TfFamily::Gev as c_int);
    assert_eq!(unsafe { tf_fit_n_used(fit) }, 12);
    unsafe {
        tf_fit_free(fit);
        tf_sample_free(s);
    }
}

#[test]
fn gof_tests_are_deterministic_and_flattened() {
    let values = premium_like_values(150);
    let s = sample_from(&values);
    let mut fit = ptr::null_mut();
    assert_eq!(unsafe { tf_fit_gev(s, &mut fit) }, TfStatus::Ok);

    let mut a = TfGofResult {
        statistic: 0.0,
        p_value: 0.0,
        reject: 0,
        alpha: 0.0,
        bootstrap_reps: 0,
        refit_retries: 0,
    };
    let mut b = a;
    unsafe {
        assert_eq!(tf_ks_test(fit, 0.05, 1, 99, 4242, &mut a), TfStatus::Ok);
        assert_eq!(tf_ks_test(fit, 0.05, 1, 99, 4242, &mut b), TfStatus::Ok);
    }
    assert_eq!(a.statistic, b.statistic);
    assert_eq!(a.p_value, b.p_value);
    assert_eq!(a.bootstrap_reps, 99);
    assert_eq!(a.reject != 0, a.p_value < a.alpha);

    let mut chi = a;
    let mut ad = a;
    unsafe {
        assert_eq!(
            tf_chi_square_test(fit, 0.05, 0, 0, 0, 1, &mut chi),
            TfStatus::Ok
        );
        assert_eq!(tf_ad_test(fit, 0.05, 99, 7, &mut ad), TfStatus::Ok);
    }
    assert_eq!(chi.bootstrap_reps, 0);
    assert!((0.0..=1.0).contains(&chi.p_value));
    assert_eq!(ad.bootstrap_reps, 99);

    // Too few replicates is an invalid argument, not a crash.
    assert_eq!(
        unsafe { tf_ks_test(fit, 0.05, 1, 10, 1, &mut a) },
        TfStatus::InvalidArgument
    );

    unsafe {
        tf_fit_free(fit);
        tf_sample_free(s);
    }
}

/// Compile a small C program against the generated header and the
/// staticlib, run it, and check its output. Skipped when the staticlib or
/// a C compiler is unavailable.
#[test]
fn c_header_compiles_and_links() {
    let manifest = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let include_dir = manifest.join("include");
    let lib_dir = manifest.join("../../target/debug");
    let static_lib = lib_dir.join("libtailfit_ffi.a");
    if !static_lib.exists() {
        eprintln!("skipping: {} not built", static_lib.display());
        return;
    }
    let cc = which_cc();
    let Some(cc) = cc else {
        eprintln!("skipping: no C compiler on PATH");
        return;
    };

    let tmp = std::env::temp_dir().join(format!("tailfit_ffi_smoke_{}", std::process::id()));
    std::fs::create_dir_all(&tmp).unwrap();
    let c_src = tmp.join("smoke.c");
    std::fs::write(
        &c_src,
        r#"
#include "tailfit.h"
#include <stdio.h>

int main(void) {
    double values[60];
    for (int i = 0; i < 60; i++) values[i] = 10.0 + 3.0 * i + (i % 7);
    TfSample *sample = NULL;
    if (tf_sample_new(values, 60, &sample) != TF_STATUS_OK) return 1;
    TfFit *fit = NULL;
    if (tf_fit_lognormal(sample, &fit) != TF_STATUS_OK) return 2;
    double mu = 0.0, sigma = 0.0;
    if (tf_fit_param(fit, TF_PARAM_MU, &mu) != TF_STATUS_OK) return 3;
    if (tf_fit_param(fit, TF_PARAM_SIGMA, &sigma) != TF_STATUS_OK) return 4;
    if (!(sigma > 0.0)) return 5;
    TfGofResult gof;
    if (tf_ks_test(fit, 0.05, 0, 0, 42, &gof) != TF_STATUS_OK) return 6;
    printf("mu=%.6f sigma=%.6f ks=%.6f\n", mu, sigma, gof.statistic);
    tf_fit_free(fit);
    tf_sample_free(sample);
    return 0;
}
"#,
    )
    .unwrap();
    let exe = tmp.join("smoke");
    let compile = std::process::Command::new(cc)
        .arg(&c_src)
        .arg("-I")
        .arg(&include_dir)
        .arg(static_lib)
        .args(["-lm", "-lpthread", "-ldl"])
        .arg("-o")
        .arg(&exe)
        .output()
        .expect("run cc");
    assert!(
        compile.status.success(),
        "cc failed: {}",
        String::from_utf8_lossy(&compile.stderr)
    );
    let run = std::process::Command::new(&exe)
        .output()
        .expect("run smoke");
    assert!(run.status.success(), "smoke exited {:?}", run.status.code());
    let out = String::from_utf8_lossy(&run.stdout);
    assert!(out.starts_with("mu="), "unexpected output: {out}");
    let _ = std::fs::remove_dir_all(&tmp);
}

fn which_cc() -> Option<&'static str> {
    ["cc", "gcc", "clang"].into_iter().find(|cc| {
        std::process::Command::new(cc)
            .arg("--version")
            .output()
            .map(|o| o.status.success())
            .unwrap_or(false)
    })
}
