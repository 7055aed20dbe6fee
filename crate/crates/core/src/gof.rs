//! Goodness-of-fit tests against a fitted model: Kolmogorov-Smirnov,
//! Chi-square on equiprobable bins, and Anderson-Darling.
//!
//! P-values come in two flavors. The asymptotic (plug-in) versions use the
//! Kolmogorov survival function and the chi-square law; they ignore that
//! the null parameters were estimated, which is the convention behind most
//! packaged tests. The parametric bootstrap refits the same family to
//! every replicate drawn from the fitted null, which accounts for the
//! estimation step and is the statistically sound default. Anderson-Darling
//! has no usable asymptotic law for arbitrary fitted families, so it is
//! bootstrap-only.

use serde::{Deserialize, Serialize};

use crate::distributions::{cdf, quantile, sample, DistributionModel};
use crate::error::{Error, Result};
use crate::estimation::{fit_gev, fit_gpd_excesses, fit_lognormal, FitResult};
use crate::numerics::{kolmogorov_sf, regularized_lower_gamma, SeededRng};

/// Which test a [`GofResult`] reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GofTest {
    Ks,
    ChiSquare,
    Ad,
}

/// How the p-value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PValueMethod {
    Asymptotic,
    Bootstrap,
}

/// Outcome of one test at significance level `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GofResult {
    pub test: GofTest,
    pub statistic: f64,
    pub p_value: f64,
    /// True iff `p_value < alpha`.
    pub reject: bool,
    pub alpha: f64,
    pub p_method: PValueMethod,
    /// 0 when the p-value is asymptotic.
    pub bootstrap_reps: usize,
    /// Replicates that needed redrawing because their refit failed.
    pub refit_retries: u32,
}

/// Bin request for the chi-square test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinSpec {
    /// max(4, n/10) bins, capped so every expected count is at least 5.
    Auto,
    Count(usize),
}

/// Reject the null iff p < alpha (strict: p = alpha accepts).
pub fn decision(p_value: f64, alpha: f64) -> bool {
    p_value < alpha
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_nan() || alpha <= 0.0 || alpha >= 1.0 {
        return Err(Error::invalid(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    Ok(())
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

/// Kolmogorov-Smirnov statistic: the largest gap between the empirical
/// step function and the model CDF, evaluated at both step corners.
pub fn ks_statistic(values: &[f64], model: &DistributionModel) -> f64 {
    let xs = sorted(values);
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(model, x);
        d = d.max((i + 1) as f64 / n - f);
        d = d.max(f - i as f64 / n);
    }
    d
}

/// Anderson-Darling statistic
/// A² = -n - (1/n) Σ (2i-1)[ln F(x_(i)) + ln(1 - F(x_(n+1-i)))],
/// with F clamped to [1e-12, 1 - 1e-12] inside the logs.
pub fn ad_statistic(values: &[f64], model: &DistributionModel) -> f64 {
    let xs = sorted(values);
    let n = xs.len();
    let nf = n as f64;
    let clamp = |f: f64| f.clamp(1e-12, 1.0 - 1e-12);
    let mut acc = 0.0;
    for i in 1..=n {
        let fi = clamp(cdf(model, xs[i - 1]));
        let fr = clamp(cdf(model, xs[n - i]));
        acc += (2 * i - 1) as f64 * (fi.ln() + (1.0 - fr).ln());
    }
    -nf - acc / nf
}

fn resolve_bins(n: usize, bins: BinSpec) -> Result<usize> {
    match bins {
        BinSpec::Count(b) => {
            if b < 2 {
                return Err(Error::invalid("chi-square needs at least 2 bins"));
            }
            if n < 5 * b {
                return Err(Error::data(format!(
                    "{n} observations cannot give expected count 5 in {b} bins"
                )));
            }
            Ok(b)
        }
        BinSpec::Auto => {
            let cap = n / 5;
            if cap < 4 {
                return Err(Error::data(format!(
                    "{n} observations are too few for a chi-square test (need 20)"
                )));
            }
            Ok((n / 10).max(4).min(cap))
        }
    }
}

/// Chi-square statistic over `bins` equiprobable bins cut at model
/// quantiles, so every expected count is exactly n/bins.
pub fn chi_square_statistic(values: &[f64], model: &DistributionModel, bins: usize) -> Result<f64> {
    let n = values.len();
    let mut edges = Vec::with_capacity(bins - 1);
    for j in 1..bins {
        edges.push(quantile(model, j as f64 / bins as f64)?);
    }
    let mut counts = vec![0usize; bins];
    for &x in values {
        // First edge at or above x; x beyond the last edge lands in the top bin.
        let idx = edges.partition_point(|&e| e < x);
        counts[idx] += 1;
    }
    let expected = n as f64 / bins as f64;
    Ok(counts
        .iter()
        .map(|&o| {
            let d = o as f64 - expected;
            d * d / expected
        })
        .sum())
}

/// Upper-tail chi-square probability P(X² >= statistic) at `dof` degrees
/// of freedom.
pub fn chi_square_pvalue(statistic: f64, dof: usize) -> Result<f64> {
    if statistic < 0.0 {
        return Err(Error::domain(
            "chi-square statistic must be nonnegative".to_string(),
        ));
    }
    Ok(1.0 - regularized_lower_gamma(dof as f64 / 2.0, statistic / 2.0)?)
}

/// Monte Carlo p-value and retry bookkeeping from [`bootstrap_pvalue`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapPValue {
    pub p_value: f64,
    pub refit_retries: u32,
}

fn refit_same_family(model: &DistributionModel, draws: &[f64]) -> Result<FitResult> {
    match model {
        DistributionModel::Lognormal(_) => fit_lognormal(draws),
        DistributionModel::Gev(_) => fit_gev(draws),
        DistributionModel::Gpd(_) => fit_gpd_excesses(draws),
    }
}

/// Parametric bootstrap p-value with refitting.
///
/// Replicate r draws n points from `model` on the child stream r, refits
/// the same family, and evaluates `statistic_fn` under the refitted model.
/// p = (1 + #{stat_r >= observed}) / (reps + 1), so p is never exactly 0.
/// Replicates whose refit fails are redrawn on sub-streams, up to 10
/// retries each, and the retry count is reported.
pub fn bootstrap_pvalue(
    observed_stat: f64,
    data: &[f64],
    model: &DistributionModel,
    statistic_fn: impl Fn(&[f64], &DistributionModel) -> f64,
    reps: usize,
    rng: &SeededRng,
) -> Result<BootstrapPValue> {
    if reps < 99 {
        return Err(Error::invalid(format!(
            "bootstrap requires at least 99 replicates, got {reps}"
        )));
    }
    if data.is_empty() {
        return Err(Error::data("bootstrap requires data"));
    }
    let n = data.len();
    let mut at_least_as_extreme = 0usize;
    let mut retries = 0u32;
    for r in 1..=reps {
        let replicate_rng = rng.derive(r as u64);
        let mut stat = None;
        for attempt in 0..=10u64 {
            let mut draw_rng = replicate_rng.derive(attempt);
            let draws = sample(model, n, &mut draw_rng);
            match refit_same_family(model, &draws) {
                Ok(fit) => {
                    stat = Some(statistic_fn(&draws, &fit.model));
                    break;
                }
                Err(_) => retries += 1,
            }
        }
        let stat = stat
            .ok_or_else(|| Error::data("bootstrap replicate failed to refit after 10 retries"))?;
        if stat >= observed_stat {
            at_least_as_extreme += 1;
        }
    }
    Ok(BootstrapPValue {
        p_value: (1.0 + at_least_as_extreme as f64) / (reps as f64 + 1.0),
        refit_retries: retries,
    })
}

/// Kolmogorov-Smirnov test. Asymptotic p-value is Q(√n·D_n); bootstrap
/// refits per replicate.
pub fn ks_test(
    values: &[f64],
    model: &DistributionModel,
    alpha: f64,
    p_method: PValueMethod,
    reps: usize,
    rng: &SeededRng,
) -> Result<GofResult> {
    check_alpha(alpha)?;
    if values.is_empty() {
        return Err(Error::data("KS test requires data"));
    }
    let statistic = ks_statistic(values, model);
    let (p_value, bootstrap_reps, refit_retries) = match p_method {
        PValueMethod::Asymptotic => (
            kolmogorov_sf((values.len() as f64).sqrt() * statistic),
            0,
            0,
        ),
        PValueMethod::Bootstrap => {
            let b = bootstrap_pvalue(statistic, values, model, ks_statistic, reps, rng)?;
            (b.p_value, reps, b.refit_retries)
        }
    };
    Ok(GofResult {
        test: GofTest::Ks,
        statistic,
        p_value,
        reject: decision(p_value, alpha),
        alpha,
        p_method,
        bootstrap_reps,
        refit_retries,
    })
}

/// Chi-square test on equiprobable bins. Degrees of freedom are
/// bins - 1 - fitted_param_count, floored at 1, in the asymptotic mode.
#[allow(clippy::too_many_arguments)]
pub fn chi_square_test(
    values: &[f64],
    model: &DistributionModel,
    alpha: f64,
    bins: BinSpec,
    fitted_param_count: usize,
    p_method: PValueMethod,
    reps: usize,
    rng: &SeededRng,
) -> Result<GofResult> {
    check_alpha(alpha)?;
    if values.is_empty() {
        return Err(Error::data("chi-square test requires data"));
    }
    let b = resolve_bins(values.len(), bins)?;
    let statistic = chi_square_statistic(values, model, b)?;
    let (p_value, bootstrap_reps, refit_retries) = match p_method {
        PValueMethod::Asymptotic => {
            let dof = (b as i64 - 1 - fitted_param_count as i64).max(1) as usize;
            (chi_square_pvalue(statistic, dof)?, 0, 0)
        }
        PValueMethod::Bootstrap => {
            let stat_fn = |d: &[f64], m: &DistributionModel| {
                chi_square_statistic(d, m, b).unwrap_or(f64::INFINITY)
            };
            let boot = bootstrap_pvalue(statistic, values, model, stat_fn, reps, rng)?;
            (boot.p_value, reps, boot.refit_retries)
        }
    };
    Ok(GofResult {
        test: GofTest::ChiSquare,
        statistic,
        p_value,
        reject: decision(p_value, alpha),
        alpha,
        p_method,
        bootstrap_reps,
        refit_retries,
    })
}

/// Anderson-Darling test; the p-value is always a parametric bootstrap.
pub fn ad_test(
    values: &[f64],
    model: &DistributionModel,
    alpha: f64,
    reps: usize,
    rng: &SeededRng,
) -> Result<GofResult> {
    check_alpha(alpha)?;
    if values.is_empty() {
        return Err(Error::data("AD test requires data"));
    }
    let statistic = ad_statistic(values, model);
    let boot = bootstrap_pvalue(statistic, values, model, ad_statistic, reps, rng)?;
    Ok(GofResult {
        test: GofTest::Ad,
        statistic,
        p_value: boot.p_value,
        reject: decision(boot.p_value, alpha),
        alpha,
        p_method: PValueMethod::Bootstrap,
        bootstrap_reps: reps,
        refit_retries: boot.refit_retries,
    })
}
