//! Builders that turn samples, fits and extreme-value series into named
//! plot-data series. Rendering stays out of scope: every figure is a
//! sequence of (x, y) points plus meta annotations, ready for CSV or JSON.
//!
//! Plotting positions are i/(n+1) throughout (Weibull positions), which
//! keeps logs away from the 0 and 1 boundaries. QQ-style series put the
//! theoretical quantiles on the x-axis; the `orientation` meta key records
//! that convention.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::distributions::{cdf, pdf, DistributionModel, GpdParams};
use crate::error::{Error, Result};
use crate::estimation::{residuals, FitResult};
use crate::extremes::{empirical_mean_excess, ExceedanceSet, HillSeries, Sample};
use crate::gof::ks_statistic;

/// A meta annotation: numeric where possible, free text otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetaValue {
    Num(f64),
    Text(String),
}

impl From<f64> for MetaValue {
    fn from(v: f64) -> Self {
        MetaValue::Num(v)
    }
}

impl From<&str> for MetaValue {
    fn from(v: &str) -> Self {
        MetaValue::Text(v.to_string())
    }
}

impl std::fmt::Display for MetaValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MetaValue::Num(v) => write!(f, "{v}"),
            MetaValue::Text(s) => write!(f, "{s}"),
        }
    }
}

/// A named (x, y) point sequence for one diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSeries {
    /// Series kind, e.g. "hist", "exp_qq", "zipf", "mean_excess", "hill",
    /// "residual_qq", or a paired kind with a part suffix such as
    /// "excess_cdf_empirical" / "excess_cdf_fitted".
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub meta: BTreeMap<String, MetaValue>,
}

impl PlotSeries {
    fn new(name: &str) -> Self {
        PlotSeries {
            name: name.to_string(),
            points: Vec::new(),
            meta: BTreeMap::new(),
        }
    }

    fn with_meta(mut self, key: &str, value: impl Into<MetaValue>) -> Self {
        self.meta.insert(key.to_string(), value.into());
        self
    }

    pub fn meta_num(&self, key: &str) -> Option<f64> {
        match self.meta.get(key) {
            Some(MetaValue::Num(v)) => Some(*v),
            _ => None,
        }
    }
}

/// Bin request for histogram-shaped series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinCount {
    /// Freedman-Diaconis width, falling back to the √n rule when IQR = 0.
    Auto,
    Count(usize),
}

fn quantile_type7(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let h = (n as f64 - 1.0) * p;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 < n {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    } else {
        sorted[n - 1]
    }
}

struct Histogram {
    lo: f64,
    width: f64,
    counts: Vec<usize>,
}

fn build_histogram(values: &[f64], bins: BinCount) -> Result<Histogram> {
    let xs = {
        let mut v = values.to_vec();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    };
    let n = xs.len();
    let lo = xs[0];
    let hi = xs[n - 1];
    let range = hi - lo;
    if range <= 0.0 {
        return Err(Error::data("histogram requires non-constant data"));
    }
    let b = match bins {
        BinCount::Count(b) => {
            if b == 0 {
                return Err(Error::invalid("bin count must be positive"));
            }
            b
        }
        BinCount::Auto => {
            let iqr = quantile_type7(&xs, 0.75) - quantile_type7(&xs, 0.25);
            let width = 2.0 * iqr / (n as f64).cbrt();
            if width > 0.0 {
                ((range / width).ceil() as usize).max(1)
            } else {
                (n as f64).sqrt().ceil() as usize
            }
        }
    };
    let width = range / b as f64;
    let mut counts = vec![0usize; b];
    for &x in &xs {
        let idx = (((x - lo) / width) as usize).min(b - 1);
        counts[idx] += 1;
    }
    Ok(Histogram { lo, width, counts })
}

fn sample_skewness(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let m2 = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m3 = values.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n;
    m3 / m2.powf(1.5)
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn least_squares(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy > 0.0 {
        (sxy * sxy) / (sxx * syy)
    } else {
        1.0
    };
    (slope, intercept, r2)
}

/// Histogram of the raw data: bin midpoints vs counts. Meta carries the
/// mean, median and skewness so right-skew checks are assertable.
pub fn histogram_series(values: &[f64], bins: BinCount) -> Result<PlotSeries> {
    if values.len() < 2 {
        return Err(Error::data("histogram requires at least 2 observations"));
    }
    let h = build_histogram(values, bins)?;
    let mut series = PlotSeries::new("hist")
        .with_meta("bin_width", h.width)
        .with_meta("bins", h.counts.len() as f64)
        .with_meta("mean", values.iter().sum::<f64>() / values.len() as f64)
        .with_meta("median", median(values))
        .with_meta("skewness", sample_skewness(values));
    series.points = h
        .counts
        .iter()
        .enumerate()
        .map(|(i, &c)| (h.lo + (i as f64 + 0.5) * h.width, c as f64))
        .collect();
    Ok(series)
}

/// Exponential QQ plot: (-ln(1 - i/(n+1)), x_(i)) for ascending order
/// statistics. Meta carries the least-squares reference line and the mean
/// residual over the last decile — positive when the data's tail is
/// heavier than exponential.
pub fn exp_qq_series(values: &[f64]) -> Result<PlotSeries> {
    if values.len() < 2 {
        return Err(Error::data("QQ plot requires at least 2 observations"));
    }
    let mut xs = values.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len();
    let points: Vec<(f64, f64)> = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let p = (i + 1) as f64 / (n + 1) as f64;
            (-(1.0 - p).ln(), x)
        })
        .collect();
    let (slope, intercept, r2) = least_squares(&points);
    let tail_len = (n / 10).max(1);
    let tail_residual_mean = points[n - tail_len..]
        .iter()
        .map(|&(x, y)| y - (intercept + slope * x))
        .sum::<f64>()
        / tail_len as f64;
    let mut series = PlotSeries::new("exp_qq")
        .with_meta("slope", slope)
        .with_meta("intercept", intercept)
        .with_meta("r_squared", r2)
        .with_meta("tail_residual_mean", tail_residual_mean)
        .with_meta("orientation", "theoretical quantiles on x");
    series.points = points;
    Ok(series)
}

/// Zipf plot: log-log empirical survival. For each distinct value v in
/// ascending order the point is (ln v, ln(r/n)) where r counts
/// observations >= v. Meta carries the fitted slope, which estimates -α
/// for Paretian tails.
pub fn zipf_series(values: &[f64]) -> Result<PlotSeries> {
    if values.len() < 2 {
        return Err(Error::data("Zipf plot requires at least 2 observations"));
    }
    if values.iter().any(|&x| x <= 0.0 || !x.is_finite()) {
        return Err(Error::data("Zipf plot requires strictly positive data"));
    }
    let mut xs = values.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len();
    let mut points: Vec<(f64, f64)> = Vec::new();
    for (i, &v) in xs.iter().enumerate() {
        // Skip duplicates: one point per distinct value.
        if i + 1 < n && xs[i + 1] == v {
            continue;
        }
        let rank = (n - i) as f64; // observations >= v
        points.push((v.ln(), (rank / n as f64).ln()));
    }
    let (slope, intercept, _) = least_squares(&points);
    let mut series = PlotSeries::new("zipf")
        .with_meta("slope", slope)
        .with_meta("intercept", intercept);
    series.points = points;
    Ok(series)
}

/// Empirical mean excess over a threshold grid: the ascending order
/// statistics with the top two excluded. A supplied GPD fit contributes
/// its implied reference slope ξ/(1-ξ).
pub fn mean_excess_series(sample: &Sample, gpd: Option<&GpdParams>) -> Result<PlotSeries> {
    if sample.len() < 3 {
        return Err(Error::data(
            "mean excess plot requires at least 3 observations",
        ));
    }
    let mut xs = sample.values().to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.truncate(xs.len() - 2);
    xs.dedup();
    let mut points = Vec::with_capacity(xs.len());
    for &u in &xs {
        points.push((u, empirical_mean_excess(sample, u)?));
    }
    let mut series = PlotSeries::new("mean_excess");
    if let Some(p) = gpd {
        series = series.with_meta("gpd_slope", p.shape / (1.0 - p.shape));
    }
    series.points = points;
    Ok(series)
}

/// Hill plot: (k, α̂(k)).
pub fn hill_plot_series(series: &HillSeries) -> PlotSeries {
    let mut s = PlotSeries::new("hill");
    s.points = series
        .points
        .iter()
        .map(|&(k, alpha)| (k as f64, alpha))
        .collect();
    s
}

/// Exponential QQ plot of the model residuals.
pub fn residual_qq_series(fit: &FitResult, data: &[f64]) -> Result<PlotSeries> {
    let r = residuals(fit, data)?;
    let mut series = exp_qq_series(&r)?;
    series.name = "residual_qq".to_string();
    Ok(series)
}

/// Empirical vs fitted CDF of the exceedances, evaluated at the same
/// abscissae. The empirical part's meta carries the maximum vertical gap,
/// which equals the KS statistic on the same inputs.
pub fn excess_cdf_series(
    excess: &ExceedanceSet,
    fit: &FitResult,
) -> Result<(PlotSeries, PlotSeries)> {
    let model = match &fit.model {
        m @ DistributionModel::Gpd(_) => m,
        other => {
            return Err(Error::invalid(format!(
                "excess CDF needs a GPD fit, got {}",
                other.family_name()
            )))
        }
    };
    let mut ys = excess.exceedances.clone();
    ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = ys.len();
    let mut empirical = Vec::new();
    let mut fitted = Vec::new();
    for (i, &y) in ys.iter().enumerate() {
        // Ties collapse to the highest step.
        if i + 1 < n && ys[i + 1] == y {
            continue;
        }
        empirical.push((y, (i + 1) as f64 / n as f64));
        fitted.push((y, cdf(model, y)));
    }
    let gap = ks_statistic(&excess.exceedances, model);
    let mut emp = PlotSeries::new("excess_cdf_empirical")
        .with_meta("threshold", excess.threshold)
        .with_meta("ks_gap", gap);
    emp.points = empirical;
    let mut fit_series =
        PlotSeries::new("excess_cdf_fitted").with_meta("threshold", excess.threshold);
    fit_series.points = fitted;
    Ok((emp, fit_series))
}

/// Tail of the underlying distribution above the POT threshold:
/// empirical survival points of the full sample paired with the fitted
/// tail (n_exceed/n_total)·(1 - GPD(x - u)).
pub fn tail_series(sample: &Sample, fit: &FitResult) -> Result<(PlotSeries, PlotSeries)> {
    let u = fit
        .threshold
        .ok_or_else(|| Error::invalid("tail series needs a POT fit with a recorded threshold"))?;
    let model = match &fit.model {
        m @ DistributionModel::Gpd(_) => m,
        other => {
            return Err(Error::invalid(format!(
                "tail series needs a GPD fit, got {}",
                other.family_name()
            )))
        }
    };
    let mut xs = sample.values().to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n_total = xs.len();
    let n_exceed = xs.iter().filter(|&&x| x > u).count();
    if n_exceed == 0 {
        return Err(Error::data(format!("no observations above threshold {u}")));
    }
    let fraction = n_exceed as f64 / n_total as f64;
    let mut empirical = Vec::new();
    let mut fitted = Vec::new();
    for (i, &x) in xs.iter().enumerate() {
        if x <= u || (i + 1 < n_total && xs[i + 1] == x) {
            continue;
        }
        let survival = 1.0 - (i + 1) as f64 / (n_total + 1) as f64;
        empirical.push((x, survival));
        fitted.push((x, fraction * (1.0 - cdf(model, x - u))));
    }
    let mut emp = PlotSeries::new("tail_empirical")
        .with_meta("threshold", u)
        .with_meta("tail_fraction", fraction);
    emp.points = empirical;
    let mut fs = PlotSeries::new("tail_fitted")
        .with_meta("threshold", u)
        .with_meta("tail_fraction", fraction);
    fs.points = fitted;
    Ok((emp, fs))
}

/// Area-normalized histogram density next to the fitted density at the
/// same bin midpoints.
pub fn density_compare_series(values: &[f64], fit: &FitResult) -> Result<(PlotSeries, PlotSeries)> {
    if values.len() < 10 {
        return Err(Error::data(
            "density comparison requires at least 10 observations",
        ));
    }
    let h = build_histogram(values, BinCount::Auto)?;
    let n = values.len() as f64;
    let mut hist_pts = Vec::with_capacity(h.counts.len());
    let mut fit_pts = Vec::with_capacity(h.counts.len());
    for (i, &c) in h.counts.iter().enumerate() {
        let mid = h.lo + (i as f64 + 0.5) * h.width;
        hist_pts.push((mid, c as f64 / (n * h.width)));
        fit_pts.push((mid, pdf(&fit.model, mid)));
    }
    let mut hist = PlotSeries::new("density_compare_hist").with_meta("bin_width", h.width);
    hist.points = hist_pts;
    let mut fitted = PlotSeries::new("density_compare_fitted").with_meta("bin_width", h.width);
    fitted.points = fit_pts;
    Ok((hist, fitted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{quantile, sample as draw};
    use crate::estimation::{fit_gpd_excesses, fit_pot, FitMethod, ThresholdChoice};
    use crate::extremes::exceedances;
    use crate::numerics::SeededRng;

    fn fit_of(model: DistributionModel) -> FitResult {
        FitResult {
            model,
            log_likelihood: 0.0,
            method: FitMethod::Direct,
            threshold: None,
            n_used: 0,
            converged: true,
        }
    }

    #[test]
    fn histogram_hand_binning() {
        let s = histogram_series(&[1.0, 1.0, 1.0, 2.0], BinCount::Count(2)).unwrap();
        let counts: Vec<f64> = s.points.iter().map(|p| p.1).collect();
        assert_eq!(counts, vec![3.0, 1.0]);
    }

    #[test]
    fn histogram_skewness_signs() {
        let mut rng = SeededRng::new(70, 0);
        // Symmetric: uniform on (0,1) via GPD(-1, 1).
        let sym = draw(
            &DistributionModel::gpd(-1.0, 1.0).unwrap(),
            20_000,
            &mut rng,
        );
        let s = histogram_series(&sym, BinCount::Auto).unwrap();
        assert!(s.meta_num("skewness").unwrap().abs() <= 0.1);

        let heavy = draw(
            &DistributionModel::lognormal(0.0, 1.0).unwrap(),
            5_000,
            &mut rng,
        );
        let s = histogram_series(&heavy, BinCount::Auto).unwrap();
        assert!(s.meta_num("mean").unwrap() > s.meta_num("median").unwrap());
        assert!(s.meta_num("skewness").unwrap() > 0.0);
    }

    #[test]
    fn exp_qq_plotting_positions() {
        let s = exp_qq_series(&[1.0, 2.0, 3.0]).unwrap();
        let expected = [-(0.75f64).ln(), -(0.5f64).ln(), -(0.25f64).ln()];
        for (p, e) in s.points.iter().zip(expected) {
            assert!((p.0 - e).abs() <= 1e-12);
        }
        assert_eq!(s.points[0].1, 1.0);
    }

    #[test]
    fn exp_qq_exponential_data_is_linear() {
        let m = DistributionModel::gpd(0.0, 1.0).unwrap();
        let n = 500;
        let data: Vec<f64> = (1..=n)
            .map(|i| quantile(&m, i as f64 / (n + 1) as f64).unwrap())
            .collect();
        let s = exp_qq_series(&data).unwrap();
        assert!(s.meta_num("r_squared").unwrap() >= 0.999);
    }

    #[test]
    fn exp_qq_heavy_tail_bends_up() {
        let mut rng = SeededRng::new(71, 0);
        let data = draw(
            &DistributionModel::lognormal(0.0, 1.0).unwrap(),
            2_000,
            &mut rng,
        );
        let s = exp_qq_series(&data).unwrap();
        assert!(
            s.meta_num("tail_residual_mean").unwrap() > 0.0,
            "heavy tail should sit above the reference line in the last decile"
        );
    }

    #[test]
    fn zipf_hand_points() {
        let s = zipf_series(&[1.0, std::f64::consts::E]).unwrap();
        assert_eq!(s.points.len(), 2);
        assert!((s.points[0].0 - 0.0).abs() <= 1e-12);
        assert!((s.points[1].0 - 1.0).abs() <= 1e-12);
        // Smallest value has survival 1: ln(1) = 0.
        assert!((s.points[0].1 - 0.0).abs() <= 1e-12);
        assert!((s.points[1].1 - (0.5f64).ln()).abs() <= 1e-12);
    }

    #[test]
    fn zipf_recovers_pareto_slope_and_scale_invariance() {
        let n = 2_000;
        let values: Vec<f64> = (1..=n)
            .map(|j| (j as f64 / (n + 1) as f64).powf(-0.5))
            .collect();
        let s = zipf_series(&values).unwrap();
        let slope = s.meta_num("slope").unwrap();
        assert!((slope + 2.0).abs() <= 0.1, "slope {slope}");

        let scaled: Vec<f64> = values.iter().map(|v| v * 250.0).collect();
        let s2 = zipf_series(&scaled).unwrap();
        assert!((s2.meta_num("slope").unwrap() - slope).abs() <= 1e-6);
    }

    #[test]
    fn zipf_rejects_nonpositive() {
        assert!(zipf_series(&[1.0, 0.0]).is_err());
        assert!(zipf_series(&[1.0, -1.0]).is_err());
    }

    #[test]
    fn mean_excess_matches_pointwise_definition() {
        let s = Sample::new(vec![1.0, 2.0, 3.0, 4.0], "t").unwrap();
        let series = mean_excess_series(&s, None).unwrap();
        // Grid excludes the top two order statistics: u in {1, 2}.
        assert_eq!(series.points.len(), 2);
        assert_eq!(series.points[1], (2.0, 1.5));
    }

    #[test]
    fn mean_excess_exponential_slope_is_flat() {
        let m = DistributionModel::gpd(0.0, 5.0).unwrap();
        let mut rng = SeededRng::new(72, 0);
        let s = Sample::new(draw(&m, 10_000, &mut rng), "exp").unwrap();
        let series = mean_excess_series(&s, None).unwrap();
        let k = series.points.len();
        let interior = &series.points[k / 10..(8 * k) / 10];
        let (slope, _, _) = least_squares(interior);
        assert!(slope.abs() <= 0.1, "slope {slope}");
    }

    #[test]
    fn mean_excess_gpd_slope() {
        let m = DistributionModel::gpd(0.3, 10.0).unwrap();
        let mut rng = SeededRng::new(73, 0);
        let s = Sample::new(draw(&m, 10_000, &mut rng), "gpd").unwrap();
        let gpd = GpdParams::new(0.3, 10.0).unwrap();
        let series = mean_excess_series(&s, Some(&gpd)).unwrap();
        assert!((series.meta_num("gpd_slope").unwrap() - 0.3 / 0.7).abs() <= 1e-12);
        let k = series.points.len();
        let interior = &series.points[k / 10..(8 * k) / 10];
        let (slope, _, _) = least_squares(interior);
        assert!((slope - 0.3 / 0.7).abs() <= 0.1, "slope {slope}");
    }

    #[test]
    fn residual_qq_true_model_is_straight() {
        let m = DistributionModel::gev(0.3, 10.0, 4.0).unwrap();
        let mut rng = SeededRng::new(74, 0);
        let data = draw(&m, 1_000, &mut rng);
        let s = residual_qq_series(&fit_of(m), &data).unwrap();
        assert_eq!(s.name, "residual_qq");
        assert!(s.meta_num("r_squared").unwrap() >= 0.98);
    }

    #[test]
    fn residual_qq_detects_misspecification() {
        let heavy = DistributionModel::gpd(0.8, 1.0).unwrap();
        let mut rng = SeededRng::new(75, 0);
        let data = draw(&heavy, 1_000, &mut rng);
        let true_fit = residual_qq_series(&fit_of(heavy), &data).unwrap();
        // An exponential model for strongly heavy-tailed data.
        let wrong =
            DistributionModel::gpd(0.0, data.iter().sum::<f64>() / data.len() as f64).unwrap();
        let wrong_fit = residual_qq_series(&fit_of(wrong), &data).unwrap();
        assert!(wrong_fit.meta_num("r_squared").unwrap() < true_fit.meta_num("r_squared").unwrap());
    }

    #[test]
    fn residual_qq_propagates_support_errors() {
        let bounded = DistributionModel::gev(-0.5, 0.0, 1.0).unwrap();
        assert!(residual_qq_series(&fit_of(bounded), &[0.5, 3.0]).is_err());
    }

    #[test]
    fn excess_cdf_gap_equals_ks_statistic() {
        let m = DistributionModel::gpd(0.2, 5.0).unwrap();
        let mut rng = SeededRng::new(76, 0);
        let raw: Vec<f64> = draw(&m, 400, &mut rng).iter().map(|y| y + 60.0).collect();
        let s = Sample::new(raw, "t").unwrap();
        let excess = exceedances(&s, 60.0).unwrap();
        let fit = fit_gpd_excesses(&excess.exceedances).unwrap();
        let (emp, fitted) = excess_cdf_series(&excess, &fit).unwrap();
        let expected = ks_statistic(&excess.exceedances, &fit.model);
        assert!((emp.meta_num("ks_gap").unwrap() - expected).abs() <= 1e-12);
        assert_eq!(emp.points.len(), fitted.points.len());
        // Large-sample agreement between the two curves.
        let max_gap = emp
            .points
            .iter()
            .zip(&fitted.points)
            .map(|(a, b)| (a.1 - b.1).abs())
            .fold(0.0f64, f64::max);
        assert!(max_gap <= 0.08, "gap {max_gap}");
    }

    #[test]
    fn excess_cdf_single_exceedance() {
        let excess = ExceedanceSet {
            threshold: 60.0,
            exceedances: vec![12.0],
            n_total: 100,
            n_exceed: 1,
        };
        let fit = fit_of(DistributionModel::gpd(0.1, 5.0).unwrap());
        let (emp, _) = excess_cdf_series(&excess, &fit).unwrap();
        assert_eq!(emp.points, vec![(12.0, 1.0)]);
    }

    #[test]
    fn excess_cdf_rejects_family_mismatch() {
        let excess = ExceedanceSet {
            threshold: 60.0,
            exceedances: vec![1.0, 2.0],
            n_total: 10,
            n_exceed: 2,
        };
        let fit = fit_of(DistributionModel::lognormal(0.0, 1.0).unwrap());
        assert!(excess_cdf_series(&excess, &fit).is_err());
    }

    #[test]
    fn tail_series_anchors() {
        let mut rng = SeededRng::new(77, 0);
        let xs: Vec<f64> = (0..5000).map(|_| rng.next_f64().powf(-0.5)).collect();
        let s = Sample::new(xs, "pareto").unwrap();
        let fit = fit_pot(&s, ThresholdChoice::Fixed(2.0)).unwrap();
        let (emp, fitted) = tail_series(&s, &fit).unwrap();
        let fraction = emp.meta_num("tail_fraction").unwrap();
        // Just above the threshold the fitted tail starts at n_exceed/n_total.
        assert!((fitted.points[0].1 - fraction).abs() <= 0.01);
        // Fitted and empirical survival stay uniformly close above u.
        let max_gap = emp
            .points
            .iter()
            .zip(&fitted.points)
            .map(|(a, b)| (a.1 - b.1).abs())
            .fold(0.0f64, f64::max);
        assert!(max_gap <= 0.05, "gap {max_gap}");
    }

    #[test]
    fn tail_series_bounded_fit_reaches_zero() {
        let mut rng = SeededRng::new(78, 0);
        let m = DistributionModel::gpd(-0.4, 10.0).unwrap();
        let raw: Vec<f64> = draw(&m, 500, &mut rng).iter().map(|y| y + 50.0).collect();
        let s = Sample::new(raw, "t").unwrap();
        let fit = fit_pot(&s, ThresholdChoice::Fixed(50.0)).unwrap();
        let (_, fitted) = tail_series(&s, &fit).unwrap();
        if let DistributionModel::Gpd(p) = fit.model {
            assert!(p.shape < 0.0);
            let endpoint = 50.0 + p.upper_endpoint();
            let last = fitted.points.last().unwrap();
            assert!(last.0 <= endpoint);
            // Fitted tail vanishes at the endpoint.
            assert!(fitted.points.iter().all(|&(_, s)| s >= 0.0));
        } else {
            unreachable!();
        }
    }

    #[test]
    fn tail_series_requires_threshold_metadata() {
        let s = Sample::new(vec![1.0, 2.0, 3.0], "t").unwrap();
        let fit = fit_of(DistributionModel::gpd(0.1, 1.0).unwrap());
        assert!(tail_series(&s, &fit).is_err());
    }

    #[test]
    fn density_histogram_integrates_to_one() {
        let mut rng = SeededRng::new(79, 0);
        let m = DistributionModel::gev(0.2, 50.0, 20.0).unwrap();
        let data = draw(&m, 2_000, &mut rng);
        let fit = fit_of(m);
        let (hist, fitted) = density_compare_series(&data, &fit).unwrap();
        let width = hist.meta_num("bin_width").unwrap();
        let area: f64 = hist.points.iter().map(|p| p.1 * width).sum();
        assert!((area - 1.0).abs() <= 1e-9, "area {area}");
        // Fitted points delegate to the pdf.
        for &(x, y) in &fitted.points {
            assert_eq!(y, pdf(&fit.model, x));
        }
        // Well-specified model: curves agree to a tenth of the peak.
        let peak = fitted.points.iter().map(|p| p.1).fold(0.0f64, f64::max);
        let mean_abs: f64 = hist
            .points
            .iter()
            .zip(&fitted.points)
            .map(|(a, b)| (a.1 - b.1).abs())
            .sum::<f64>()
            / hist.points.len() as f64;
        assert!(mean_abs <= 0.1 * peak, "mean abs {mean_abs} vs peak {peak}");
    }

    #[test]
    fn series_x_coordinates_increase() {
        let mut rng = SeededRng::new(80, 0);
        let data = draw(
            &DistributionModel::lognormal(1.0, 0.8).unwrap(),
            300,
            &mut rng,
        );
        let s = Sample::new(data.clone(), "t").unwrap();
        let checks = vec![
            exp_qq_series(&data).unwrap(),
            zipf_series(&data).unwrap(),
            mean_excess_series(&s, None).unwrap(),
            hill_plot_series(&crate::extremes::hill_series(&s).unwrap()),
        ];
        for series in checks {
            for w in series.points.windows(2) {
                assert!(
                    w[1].0 > w[0].0,
                    "{}: x not strictly increasing",
                    series.name
                );
            }
        }
    }
}
