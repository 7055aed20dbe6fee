//! Maximum-likelihood fitting.
//!
//! - Lognormal: closed form, μ̂ = mean of ln x, σ̂² = mean of (ln x - μ̂)².
//! - GEV: Nelder-Mead over (shape, location, ln scale) from a Gumbel
//!   moment start.
//! - GPD: profile likelihood over the scalar τ with ξ̂ = (1/n) Σ ln(1 - τ̂ y_i)
//!   and β̂ = -ξ̂/τ̂, bracketed on a log-spaced grid and polished by
//!   golden-section search. τ is the negative of ξ/β, so τ̂ < 0 exactly when
//!   ξ̂ > 0.
//!
//! Pipelines compose the extremes preparation with these fits: block
//! maxima feed the GEV, threshold exceedances feed the GPD.

use serde::{Deserialize, Serialize};

use crate::distributions::{
    log_likelihood, DistributionModel, GevParams, GpdParams, LognormalParams, SHAPE_ZERO_TOL,
};
use crate::error::{Error, Result};
use crate::extremes::{
    block_maxima, exceedances, hill_series, select_threshold, BlockSpec, ExceedanceSet, Sample,
    StabilityConfig,
};
use crate::numerics::{golden_section_max, nelder_mead, normal_cdf};

/// Which pipeline produced a fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitMethod {
    Direct,
    BlockMaxima,
    Pot,
}

/// A fitted model with the data bookkeeping needed for reporting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: DistributionModel,
    pub log_likelihood: f64,
    pub method: FitMethod,
    /// Resolved threshold for POT fits.
    pub threshold: Option<f64>,
    /// Observations actually used: block count, exceedance count or full n.
    pub n_used: usize,
    pub converged: bool,
}

/// Threshold request for the POT pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdChoice {
    /// Pick from the Hill plot by the sliding-window stability rule.
    Auto,
    Fixed(f64),
}

fn require_finite(values: &[f64], what: &str) -> Result<()> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::data(format!("{what} must be finite")));
    }
    Ok(())
}

/// Closed-form Lognormal MLE on strictly positive data.
pub fn fit_lognormal(values: &[f64]) -> Result<FitResult> {
    if values.is_empty() {
        return Err(Error::data("lognormal fit requires data"));
    }
    require_finite(values, "lognormal data")?;
    if values.iter().any(|&x| x <= 0.0) {
        return Err(Error::data("lognormal fit requires strictly positive data"));
    }
    let n = values.len() as f64;
    let logs: Vec<f64> = values.iter().map(|x| x.ln()).collect();
    let mu = logs.iter().sum::<f64>() / n;
    let var = logs.iter().map(|l| (l - mu) * (l - mu)).sum::<f64>() / n;
    if var == 0.0 {
        return Err(Error::data(
            "degenerate sample: zero variance on the log scale",
        ));
    }
    let model = DistributionModel::Lognormal(LognormalParams::new(mu, var.sqrt())?);
    Ok(FitResult {
        log_likelihood: log_likelihood(&model, values),
        model,
        method: FitMethod::Direct,
        threshold: None,
        n_used: values.len(),
        converged: true,
    })
}

/// Gumbel moment start for the GEV search: scale = sd·√6/π,
/// location = mean - 0.5772·scale, shape = 0.1 shrunk toward 0 until the
/// whole sample is inside the support.
fn gev_start(values: &[f64]) -> Result<(f64, f64, f64)> {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = (values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt();
    if sd == 0.0 {
        return Err(Error::data("degenerate sample: zero variance"));
    }
    let scale = sd * 6.0f64.sqrt() / std::f64::consts::PI;
    let location = mean - 0.5772 * scale;
    let mut shape = 0.1;
    for _ in 0..20 {
        let m = DistributionModel::Gev(GevParams::new(shape, location, scale)?);
        if log_likelihood(&m, values).is_finite() {
            return Ok((shape, location, scale));
        }
        shape *= 0.5;
    }
    Ok((0.0, location, scale))
}

/// Three-parameter GEV MLE by simplex search.
pub fn fit_gev(values: &[f64]) -> Result<FitResult> {
    if values.len() < 5 {
        return Err(Error::data(format!(
            "GEV fit requires at least 5 observations, got {}",
            values.len()
        )));
    }
    require_finite(values, "GEV data")?;
    let (shape0, loc0, scale0) = gev_start(values)?;

    let objective = |p: &[f64]| {
        let scale = p[2].exp();
        if !scale.is_finite() || scale <= 0.0 {
            return f64::INFINITY;
        }
        match GevParams::new(p[0], p[1], scale) {
            Ok(g) => -log_likelihood(&DistributionModel::Gev(g), values),
            Err(_) => f64::INFINITY,
        }
    };
    let start = [shape0, loc0, scale0.ln()];
    let opt = nelder_mead(objective, &start, 1e-8, 5000)?;
    let model = DistributionModel::Gev(GevParams::new(
        opt.argmin[0],
        opt.argmin[1],
        opt.argmin[2].exp(),
    )?);
    Ok(FitResult {
        log_likelihood: -opt.objective_value,
        model,
        method: FitMethod::Direct,
        threshold: None,
        n_used: values.len(),
        converged: opt.converged,
    })
}

/// Profile log-likelihood of the GPD in τ. At τ = 0 the removable
/// singularity is the exponential model with β = mean(y).
fn gpd_profile(tau: f64, y: &[f64], mean_y: f64) -> f64 {
    let n = y.len() as f64;
    if tau == 0.0 {
        return -n * (mean_y.ln() + 1.0);
    }
    let mut sum = 0.0;
    for &v in y {
        let w = -tau * v;
        if w <= -1.0 {
            return f64::NEG_INFINITY;
        }
        sum += w.ln_1p();
    }
    let xi = sum / n;
    let beta = -xi / tau;
    if beta <= 0.0 || !beta.is_finite() {
        return f64::NEG_INFINITY;
    }
    -n * beta.ln() - n * xi - n
}

/// GPD MLE on raw exceedances (all strictly positive).
pub fn fit_gpd_excesses(y: &[f64]) -> Result<FitResult> {
    if y.len() < 5 {
        return Err(Error::data(format!(
            "GPD fit requires at least 5 exceedances, got {}",
            y.len()
        )));
    }
    require_finite(y, "GPD exceedances")?;
    if y.iter().any(|&v| v <= 0.0) {
        return Err(Error::data("exceedances must be strictly positive"));
    }
    let n = y.len() as f64;
    let mean_y = y.iter().sum::<f64>() / n;
    let max_y = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    // τ domain (-10/ȳ, (1-1e-9)/max y), log-spaced on each side of 0.
    let lo = -10.0 / mean_y;
    let hi = (1.0 - 1e-9) / max_y;
    let tiny = 1e-10 / mean_y;
    const HALF_GRID: usize = 256;
    let mut grid = Vec::with_capacity(2 * HALF_GRID + 1);
    // Largest magnitude first so the grid is increasing in τ.
    for i in 0..HALF_GRID {
        let t = i as f64 / (HALF_GRID - 1) as f64;
        let magnitude = (-lo) * (tiny / -lo).powf(t);
        grid.push(-magnitude);
    }
    grid.push(0.0);
    for i in 0..HALF_GRID {
        let t = i as f64 / (HALF_GRID - 1) as f64;
        grid.push(tiny * (hi / tiny).powf(t));
    }

    let profile = |tau: f64| gpd_profile(tau, y, mean_y);
    let mut best_idx = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (i, &tau) in grid.iter().enumerate() {
        let v = profile(tau);
        if v > best_val {
            best_val = v;
            best_idx = i;
        }
    }
    let bracket_lo = if best_idx == 0 {
        grid[0]
    } else {
        grid[best_idx - 1]
    };
    let bracket_hi = if best_idx + 1 == grid.len() {
        grid[best_idx]
    } else {
        grid[best_idx + 1]
    };
    let converged = best_idx > 0 && best_idx + 1 < grid.len();

    let tau_hat = if bracket_lo < bracket_hi {
        golden_section_max(profile, bracket_lo, bracket_hi, 1e-11 / mean_y)?
    } else {
        grid[best_idx]
    };

    let model = if tau_hat.abs() * mean_y < 1e-8 {
        // Exponential limit.
        DistributionModel::Gpd(GpdParams::new(0.0, mean_y)?)
    } else {
        let xi = y.iter().map(|&v| (-tau_hat * v).ln_1p()).sum::<f64>() / n;
        let beta = -xi / tau_hat;
        DistributionModel::Gpd(GpdParams::new(xi, beta)?)
    };
    Ok(FitResult {
        log_likelihood: log_likelihood(&model, y),
        model,
        method: FitMethod::Direct,
        threshold: None,
        n_used: y.len(),
        converged,
    })
}

/// GPD MLE for an exceedance set; records the threshold.
pub fn fit_gpd(excess: &ExceedanceSet) -> Result<FitResult> {
    let mut fit = fit_gpd_excesses(&excess.exceedances)?;
    fit.threshold = Some(excess.threshold);
    Ok(fit)
}

/// Block-maxima pipeline: split, take maxima, fit the GEV.
pub fn fit_block_maxima(sample: &Sample, spec: &BlockSpec) -> Result<FitResult> {
    let maxima = block_maxima(sample, spec)?;
    let mut fit = fit_gev(maxima.values())?;
    fit.method = FitMethod::BlockMaxima;
    fit.n_used = spec.block_count;
    Ok(fit)
}

/// Peak-over-threshold pipeline: resolve the threshold, take exceedances,
/// fit the GPD.
pub fn fit_pot(sample: &Sample, threshold: ThresholdChoice) -> Result<FitResult> {
    let u = match threshold {
        ThresholdChoice::Fixed(u) => u,
        ThresholdChoice::Auto => {
            let series = hill_series(sample)?;
            let cfg = StabilityConfig::for_len(series.points.len());
            select_threshold(&series, &cfg)?.threshold
        }
    };
    let excess = exceedances(sample, u)?;
    let mut fit = fit_gpd(&excess)?;
    fit.method = FitMethod::Pot;
    fit.n_used = excess.n_exceed;
    Ok(fit)
}

/// Transform observations to the unit-exponential scale under the fitted
/// model. Under a correct model the residuals are i.i.d. Exp(1).
///
/// - GEV: r = (1 + θz)^(-1/θ) with z = (x - location)/scale (θ = 0: e^-z)
/// - GPD: r = ln(1 + ξy/β)/ξ (ξ = 0: y/β)
/// - Lognormal: r = -ln(1 - F(x))
pub fn residuals(fit: &FitResult, data: &[f64]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(data.len());
    match &fit.model {
        DistributionModel::Gev(p) => {
            for &x in data {
                let z = (x - p.location) / p.scale;
                if p.shape.abs() < SHAPE_ZERO_TOL {
                    out.push((-z).exp());
                } else {
                    let w = p.shape * z;
                    if w <= -1.0 {
                        return Err(Error::data(format!(
                            "observation {x} lies outside the fitted GEV support"
                        )));
                    }
                    out.push((-w.ln_1p() / p.shape).exp());
                }
            }
        }
        DistributionModel::Gpd(p) => {
            for &y in data {
                if y < 0.0 || y > p.upper_endpoint() {
                    return Err(Error::data(format!(
                        "exceedance {y} lies outside the fitted GPD support"
                    )));
                }
                if p.shape.abs() < SHAPE_ZERO_TOL {
                    out.push(y / p.scale);
                } else {
                    out.push((p.shape * y / p.scale).ln_1p() / p.shape);
                }
            }
        }
        DistributionModel::Lognormal(p) => {
            for &x in data {
                if x <= 0.0 {
                    return Err(Error::data(format!(
                        "observation {x} lies outside the lognormal support"
                    )));
                }
                let z = (x.ln() - p.mu) / p.sigma;
                // -ln(1 - Φ(z)) without cancellation in the right tail.
                out.push(-normal_cdf(-z).ln());
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{quantile, sample as draw};
    use crate::numerics::{nelder_mead_simplex, SeededRng};

    fn gpd(shape: f64, scale: f64) -> DistributionModel {
        DistributionModel::gpd(shape, scale).unwrap()
    }

    fn gev(shape: f64, loc: f64, scale: f64) -> DistributionModel {
        DistributionModel::gev(shape, loc, scale).unwrap()
    }

    #[test]
    fn lognormal_two_point_hand_fit() {
        let e = std::f64::consts::E;
        let fit = fit_lognormal(&[e, e * e * e]).unwrap();
        match fit.model {
            DistributionModel::Lognormal(p) => {
                assert!((p.mu - 2.0).abs() <= 1e-12);
                assert!((p.sigma - 1.0).abs() <= 1e-12);
            }
            _ => unreachable!(),
        }
        assert!(fit.converged);
        assert_eq!(fit.n_used, 2);
    }

    #[test]
    fn lognormal_rejects_degenerate_and_nonpositive() {
        assert!(fit_lognormal(&[1.0, 1.0, 1.0]).is_err());
        assert!(fit_lognormal(&[1.0, -1.0]).is_err());
        assert!(fit_lognormal(&[]).is_err());
    }

    #[test]
    fn lognormal_recovery() {
        let truth = DistributionModel::lognormal(0.5, 0.8).unwrap();
        let mut rng = SeededRng::new(21, 0);
        let xs = draw(&truth, 5000, &mut rng);
        let fit = fit_lognormal(&xs).unwrap();
        match fit.model {
            DistributionModel::Lognormal(p) => {
                assert!((p.mu - 0.5).abs() <= 0.05, "mu {}", p.mu);
                assert!((p.sigma - 0.8).abs() <= 0.04, "sigma {}", p.sigma);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn lognormal_closed_form_matches_simplex() {
        for seed in 0..20u64 {
            let truth = DistributionModel::lognormal(1.2, 0.6).unwrap();
            let mut rng = SeededRng::new(300 + seed, 0);
            let xs = draw(&truth, 400, &mut rng);
            let fit = fit_lognormal(&xs).unwrap();
            let obj = |p: &[f64]| match LognormalParams::new(p[0], p[1].exp()) {
                Ok(m) => -log_likelihood(&DistributionModel::Lognormal(m), &xs),
                Err(_) => f64::INFINITY,
            };
            let opt = nelder_mead(obj, &[0.0, 0.0], 1e-12, 5000).unwrap();
            match fit.model {
                DistributionModel::Lognormal(p) => {
                    assert!((p.mu - opt.argmin[0]).abs() <= 1e-6, "seed {seed}");
                    assert!((p.sigma - opt.argmin[1].exp()).abs() <= 1e-6, "seed {seed}");
                }
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn gev_recovery_at_table_scale() {
        let truth = gev(0.368, 53.335, 30.848);
        let mut rng = SeededRng::new(77, 0);
        let xs = draw(&truth, 5000, &mut rng);
        let fit = fit_gev(&xs).unwrap();
        assert!(fit.converged);
        match fit.model {
            DistributionModel::Gev(p) => {
                assert!((p.shape - 0.368).abs() <= 0.1, "shape {}", p.shape);
                assert!(
                    (p.location - 53.335).abs() <= 0.05 * 53.335,
                    "loc {}",
                    p.location
                );
                assert!(
                    (p.scale - 30.848).abs() <= 0.10 * 30.848,
                    "scale {}",
                    p.scale
                );
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn gev_affine_equivariance() {
        let truth = gev(0.25, 10.0, 4.0);
        let mut rng = SeededRng::new(78, 0);
        let xs = draw(&truth, 4000, &mut rng);
        let (a, b) = (3.0, 100.0);
        let ys: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
        let fx = fit_gev(&xs).unwrap();
        let fy = fit_gev(&ys).unwrap();
        match (fx.model, fy.model) {
            (DistributionModel::Gev(px), DistributionModel::Gev(py)) => {
                assert!((px.shape - py.shape).abs() <= 2e-2);
                assert!((py.location - (a * px.location + b)).abs() <= 0.05 * py.location.abs());
                assert!((py.scale - a * px.scale).abs() <= 0.05 * py.scale);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn gev_gumbel_boundary() {
        let truth = gev(0.0, 0.0, 1.0);
        let mut rng = SeededRng::new(79, 0);
        let xs = draw(&truth, 5000, &mut rng);
        let fit = fit_gev(&xs).unwrap();
        match fit.model {
            DistributionModel::Gev(p) => {
                assert!(p.shape.abs() <= 0.08, "shape {}", p.shape)
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn gev_requires_minimum_points() {
        assert!(fit_gev(&[1.0, 2.0, 3.0, 4.0]).is_err());
    }

    #[test]
    fn gev_fit_supports_all_data_and_beats_start() {
        let truth = gev(-0.2, 5.0, 2.0);
        let mut rng = SeededRng::new(80, 0);
        let xs = draw(&truth, 1500, &mut rng);
        let fit = fit_gev(&xs).unwrap();
        assert!(xs.iter().all(|&x| fit.model.in_support(x)));
        // Recompute the documented moment start and compare likelihoods.
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let sd = (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt();
        let scale0 = sd * 6.0f64.sqrt() / std::f64::consts::PI;
        let start = gev(0.1, mean - 0.5772 * scale0, scale0);
        assert!(fit.log_likelihood >= log_likelihood(&start, &xs));
    }

    #[test]
    fn gpd_exponential_recovery() {
        let truth = gpd(0.0, 2.0);
        let mut rng = SeededRng::new(90, 0);
        let ys = draw(&truth, 5000, &mut rng);
        let fit = fit_gpd_excesses(&ys).unwrap();
        match fit.model {
            DistributionModel::Gpd(p) => {
                assert!(p.shape.abs() <= 0.06, "shape {}", p.shape);
                assert!((p.scale - 2.0).abs() <= 0.12, "scale {}", p.scale);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn gpd_recovery_at_table_scale() {
        let truth = gpd(-0.451, 119.918);
        let mut rng = SeededRng::new(91, 0);
        let ys = draw(&truth, 2000, &mut rng);
        let fit = fit_gpd_excesses(&ys).unwrap();
        match fit.model {
            DistributionModel::Gpd(p) => {
                assert!((p.shape + 0.451).abs() <= 0.08, "shape {}", p.shape);
                assert!(
                    (p.scale - 119.918).abs() <= 0.08 * 119.918,
                    "scale {}",
                    p.scale
                );
            }
            _ => unreachable!(),
        }
        assert!(ys.iter().all(|&y| fit.model.in_support(y)));
    }

    #[test]
    fn gpd_profile_matches_two_dim_simplex() {
        for seed in 0..10u64 {
            let truth = gpd(0.2, 5.0);
            let mut rng = SeededRng::new(400 + seed, 0);
            let ys = draw(&truth, 300, &mut rng);
            let profile_fit = fit_gpd_excesses(&ys).unwrap();
            let obj = |p: &[f64]| match GpdParams::new(p[0], p[1].exp()) {
                Ok(m) => -log_likelihood(&DistributionModel::Gpd(m), &ys),
                Err(_) => f64::INFINITY,
            };
            let simplex = vec![
                vec![0.1, ys.iter().sum::<f64>().ln() - (ys.len() as f64).ln()],
                vec![0.4, 1.5],
                vec![-0.2, 2.0],
            ];
            let opt = nelder_mead_simplex(obj, simplex, 1e-12, 8000).unwrap();
            assert!(
                (profile_fit.log_likelihood + opt.objective_value).abs() <= 1e-3,
                "seed {seed}: profile {} vs simplex {}",
                profile_fit.log_likelihood,
                -opt.objective_value
            );
        }
    }

    #[test]
    fn golden_section_profile_matches_grid_scan() {
        // The line search inside the GPD fit against a brute-force scan of
        // the same profile over a 10^6-point grid.
        let truth = gpd(0.4, 8.0);
        let mut rng = SeededRng::new(410, 0);
        let ys = draw(&truth, 50, &mut rng);
        let n = ys.len() as f64;
        let mean_y = ys.iter().sum::<f64>() / n;
        let max_y = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let profile = |tau: f64| {
            let xi = ys.iter().map(|&v| (-tau * v).ln_1p()).sum::<f64>() / n;
            let beta = -xi / tau;
            -n * beta.ln() - n * xi - n
        };
        // Bracket the maximizer away from the removable singularity at 0.
        let (lo, hi) = (-5.0 / mean_y, -1e-4 / max_y);
        let polished = golden_section_max(profile, lo, hi, 1e-10).unwrap();

        let mut best_tau = lo;
        let mut best_val = f64::NEG_INFINITY;
        for i in 0..1_000_000 {
            let tau = lo + (hi - lo) * i as f64 / 999_999.0;
            let v = profile(tau);
            if v > best_val {
                best_val = v;
                best_tau = tau;
            }
        }
        assert!(
            (polished - best_tau).abs() <= 1e-4,
            "golden section {polished} vs grid {best_tau}"
        );
    }

    #[test]
    fn gpd_sign_convention() {
        // Heavy-tailed Pareto-type data: ξ̂ > 0; bounded data: ξ̂ < 0.
        let mut rng = SeededRng::new(92, 0);
        let heavy = draw(&gpd(0.5, 1.0), 3000, &mut rng);
        let fit = fit_gpd_excesses(&heavy).unwrap();
        match fit.model {
            DistributionModel::Gpd(p) => {
                assert!(p.shape > 0.0);
                assert!(p.scale > 0.0);
            }
            _ => unreachable!(),
        }
        let mut rng = SeededRng::new(93, 0);
        let bounded = draw(&gpd(-0.5, 1.0), 3000, &mut rng);
        let fit = fit_gpd_excesses(&bounded).unwrap();
        match fit.model {
            DistributionModel::Gpd(p) => {
                assert!(p.shape < 0.0);
                assert!(p.scale > 0.0);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn gpd_requires_minimum_exceedances() {
        assert!(fit_gpd_excesses(&[1.0, 2.0]).is_err());
        assert!(fit_gpd_excesses(&[1.0, 2.0, 3.0, -1.0, 2.0, 4.0]).is_err());
    }

    #[test]
    fn block_maxima_pipeline_degenerates_to_direct_fit() {
        let truth = gev(0.3, 50.0, 20.0);
        let mut rng = SeededRng::new(94, 0);
        let xs: Vec<f64> = draw(&truth, 60, &mut rng)
            .into_iter()
            .map(|x| x.max(1e-3))
            .collect();
        let s = Sample::new(xs.clone(), "t").unwrap();
        let direct = fit_gev(&xs).unwrap();
        let bm = fit_block_maxima(&s, &BlockSpec::contiguous(xs.len())).unwrap();
        assert_eq!(bm.method, FitMethod::BlockMaxima);
        assert_eq!(bm.n_used, xs.len());
        assert_eq!(bm.model, direct.model);
        assert_eq!(bm.log_likelihood, direct.log_likelihood);
    }

    #[test]
    fn block_maxima_small_m_recovery() {
        // Ten blocks only: the wide tolerance reflects how little the
        // maxima carry at small M.
        let truth = gev(0.368, 53.335, 30.848);
        let mut rng = SeededRng::new(91, 0);
        let xs: Vec<f64> = draw(&truth, 1480, &mut rng)
            .into_iter()
            .map(|x| x.max(1e-3))
            .collect();
        let s = Sample::new(xs, "t").unwrap();
        let fit = fit_block_maxima(&s, &BlockSpec::contiguous(10)).unwrap();
        match fit.model {
            DistributionModel::Gev(p) => {
                assert!((p.shape - 0.368).abs() <= 0.25, "shape {}", p.shape)
            }
            _ => unreachable!(),
        }
        assert_eq!(fit.n_used, 10);
    }

    #[test]
    fn block_assignment_is_exchangeable_on_iid_data() {
        let truth = gev(0.2, 100.0, 20.0);
        for seed in 0..20u64 {
            let mut rng = SeededRng::new(500 + seed, 0);
            let xs: Vec<f64> = draw(&truth, 6000, &mut rng)
                .into_iter()
                .map(|x| x.max(1e-3))
                .collect();
            let s = Sample::new(xs, "t").unwrap();
            let contiguous = fit_block_maxima(&s, &BlockSpec::contiguous(300)).unwrap();
            let random = fit_block_maxima(&s, &BlockSpec::random(300, seed)).unwrap();
            match (contiguous.model, random.model) {
                (DistributionModel::Gev(a), DistributionModel::Gev(b)) => {
                    assert!(
                        (a.shape - b.shape).abs() <= 0.3,
                        "seed {seed}: {} vs {}",
                        a.shape,
                        b.shape
                    );
                }
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn pot_explicit_threshold_composes() {
        let mut rng = SeededRng::new(96, 0);
        let xs: Vec<f64> = draw(&gev(0.3, 70.0, 25.0), 400, &mut rng)
            .into_iter()
            .map(|x| x.max(1.0))
            .collect();
        let s = Sample::new(xs, "t").unwrap();
        let piped = fit_pot(&s, ThresholdChoice::Fixed(60.0)).unwrap();
        let manual = fit_gpd(&exceedances(&s, 60.0).unwrap()).unwrap();
        assert_eq!(piped.model, manual.model);
        assert_eq!(piped.threshold, Some(60.0));
        assert_eq!(piped.method, FitMethod::Pot);
        assert_eq!(piped.n_used, exceedances(&s, 60.0).unwrap().n_exceed);
    }

    #[test]
    fn pot_auto_on_pareto_tail() {
        // Pareto(α=2) has GPD tail index ξ = 1/α = 0.5.
        let mut rng = SeededRng::new(97, 0);
        let xs: Vec<f64> = (0..4000).map(|_| rng.next_f64().powf(-0.5)).collect();
        let s = Sample::new(xs, "pareto").unwrap();
        let fit = fit_pot(&s, ThresholdChoice::Auto).unwrap();
        match fit.model {
            DistributionModel::Gpd(p) => {
                assert!((p.shape - 0.5).abs() <= 0.15, "shape {}", p.shape)
            }
            _ => unreachable!(),
        }
        assert!(fit.threshold.is_some());
    }

    #[test]
    fn pot_threshold_above_maximum_errors() {
        let s = Sample::new(vec![1.0, 2.0, 3.0], "t").unwrap();
        assert!(fit_pot(&s, ThresholdChoice::Fixed(10.0)).is_err());
    }

    #[test]
    fn residual_hand_values() {
        let fit = FitResult {
            model: gpd(0.0, 2.0),
            log_likelihood: 0.0,
            method: FitMethod::Direct,
            threshold: None,
            n_used: 1,
            converged: true,
        };
        assert!((residuals(&fit, &[2.0]).unwrap()[0] - 1.0).abs() <= 1e-15);

        let fit = FitResult {
            model: gev(0.0, 0.0, 1.0),
            log_likelihood: 0.0,
            method: FitMethod::Direct,
            threshold: None,
            n_used: 1,
            converged: true,
        };
        assert!((residuals(&fit, &[0.0]).unwrap()[0] - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn residual_out_of_support_errors() {
        let fit = FitResult {
            model: gev(-0.5, 0.0, 1.0),
            log_likelihood: 0.0,
            method: FitMethod::Direct,
            threshold: None,
            n_used: 1,
            converged: true,
        };
        // Upper endpoint at 2.
        assert!(residuals(&fit, &[1.0, 3.0]).is_err());
    }

    #[test]
    fn residual_round_trip_through_quantiles() {
        let models = [gev(0.4, 2.0, 1.5), gpd(0.3, 10.0), gpd(-0.4, 5.0)];
        let uniforms: Vec<f64> = (1..100).map(|i| i as f64 / 100.0).collect();
        for m in models {
            let data: Vec<f64> = uniforms.iter().map(|&u| quantile(&m, u).unwrap()).collect();
            let fit = FitResult {
                model: m,
                log_likelihood: 0.0,
                method: FitMethod::Direct,
                threshold: None,
                n_used: data.len(),
                converged: true,
            };
            let r = residuals(&fit, &data).unwrap();
            for (i, &u) in uniforms.iter().enumerate() {
                let expected = match m {
                    // GEV residuals are -ln F(x) = -ln u; the survival-style
                    // transforms give -ln(1 - u).
                    DistributionModel::Gev(_) => -u.ln(),
                    _ => -(-u).ln_1p(),
                };
                assert!(
                    (r[i] - expected).abs() <= 1e-9,
                    "{}: residual {} vs {expected}",
                    m.family_name(),
                    r[i]
                );
            }
        }
        // Lognormal route.
        let m = DistributionModel::lognormal(0.3, 0.9).unwrap();
        let data: Vec<f64> = uniforms.iter().map(|&u| quantile(&m, u).unwrap()).collect();
        let fit = FitResult {
            model: m,
            log_likelihood: 0.0,
            method: FitMethod::Direct,
            threshold: None,
            n_used: data.len(),
            converged: true,
        };
        let r = residuals(&fit, &data).unwrap();
        for (i, &u) in uniforms.iter().enumerate() {
            assert!(
                (r[i] - -(-u).ln_1p()).abs() <= 1e-7,
                "lognormal residual {i}"
            );
        }
    }

    #[test]
    fn true_parameter_residuals_are_unit_exponential() {
        let m = gpd(0.3, 10.0);
        let mut rng = SeededRng::new(98, 0);
        let ys = draw(&m, 10_000, &mut rng);
        let fit = FitResult {
            model: m,
            log_likelihood: 0.0,
            method: FitMethod::Direct,
            threshold: None,
            n_used: ys.len(),
            converged: true,
        };
        let mut r = residuals(&fit, &ys).unwrap();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = r.len() as f64;
        let mut dist = 0.0f64;
        for (i, &v) in r.iter().enumerate() {
            let f = -(-v).exp_m1(); // Exp(1) CDF
            dist = dist.max((f - i as f64 / n).abs());
            dist = dist.max(((i + 1) as f64 / n - f).abs());
        }
        assert!(dist <= 0.02, "KS distance to Exp(1): {dist}");
    }
}
