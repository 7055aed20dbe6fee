//! Extreme-value data preparation: block maxima, threshold exceedances,
//! the Hill tail-index series, the empirical mean excess function and
//! Hill-plot threshold selection.

use crate::error::{Error, Result};
use crate::numerics::SeededRng;

/// An ordered series of positive observations with provenance metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    label: String,
    period_start: Option<String>,
    period_end: Option<String>,
}

impl Sample {
    /// Validates that the series is nonempty, finite and strictly positive.
    pub fn new(values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::data("sample must be nonempty"));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v <= 0.0) {
            return Err(Error::data(format!(
                "sample values must be finite and positive, found {bad}"
            )));
        }
        Ok(Sample {
            values,
            label: label.into(),
            period_start: None,
            period_end: None,
        })
    }

    pub fn with_periods(mut self, start: impl Into<String>, end: impl Into<String>) -> Self {
        self.period_start = Some(start.into());
        self.period_end = Some(end.into());
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn period_start(&self) -> Option<&str> {
        self.period_start.as_deref()
    }

    pub fn period_end(&self) -> Option<&str> {
        self.period_end.as_deref()
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// How observations are assigned to blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockAssignment {
    /// Consecutive runs in series order (the standard block-maxima method).
    Contiguous,
    /// Seeded random permutation first, then contiguous runs.
    Random,
}

/// Block-maxima configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockSpec {
    pub block_count: usize,
    pub assignment: BlockAssignment,
    /// Consumed only by [`BlockAssignment::Random`].
    pub seed: u64,
}

impl BlockSpec {
    pub fn contiguous(block_count: usize) -> Self {
        BlockSpec {
            block_count,
            assignment: BlockAssignment::Contiguous,
            seed: 0,
        }
    }

    pub fn random(block_count: usize, seed: u64) -> Self {
        BlockSpec {
            block_count,
            assignment: BlockAssignment::Random,
            seed,
        }
    }
}

/// Exceedances y_i = x_i - u over a threshold u, in original order.
#[derive(Debug, Clone, PartialEq)]
pub struct ExceedanceSet {
    pub threshold: f64,
    pub exceedances: Vec<f64>,
    pub n_total: usize,
    pub n_exceed: usize,
}

/// Hill-estimator series over the number of upper order statistics k.
#[derive(Debug, Clone, PartialEq)]
pub struct HillSeries {
    /// (k, alpha_hat) pairs in increasing k; entries with a nonpositive
    /// extreme-value index are omitted.
    pub points: Vec<(usize, f64)>,
    /// Sample sorted descending: X_{1,n} >= X_{2,n} >= ...
    pub order_stats: Vec<f64>,
}

/// Sliding-window stability rule for picking a threshold off a Hill plot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityConfig {
    /// Window length in Hill points.
    pub window: usize,
    /// Accept the first window whose (max-min)/median falls below this.
    pub rel_tolerance: f64,
}

impl StabilityConfig {
    /// Defaults: window = 10% of the series length (at least 5), tolerance 0.05.
    pub fn for_len(n_points: usize) -> Self {
        StabilityConfig {
            window: (n_points / 10).max(5),
            rel_tolerance: 0.05,
        }
    }
}

/// Outcome of threshold selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdSelection {
    /// The chosen data value X_{k*,n}.
    pub threshold: f64,
    /// Number of upper order statistics at the chosen window start.
    pub k: usize,
    /// Hill estimate at k*.
    pub alpha: f64,
    /// True when no window met the tolerance and the minimizing window was
    /// used instead.
    pub fallback: bool,
}

/// Per-block maxima M_m for m = 1..M.
///
/// Contiguous assignment splits the series into M nearly equal consecutive
/// runs (sizes differ by at most one, larger blocks first). Random
/// assignment permutes the observations with the configured seed first.
pub fn block_maxima(sample: &Sample, spec: &BlockSpec) -> Result<Sample> {
    let n = sample.len();
    if spec.block_count < 2 {
        return Err(Error::invalid(format!(
            "block_count must be at least 2, got {}",
            spec.block_count
        )));
    }
    if spec.block_count > n {
        return Err(Error::invalid(format!(
            "block_count {} exceeds sample size {n}",
            spec.block_count
        )));
    }

    let values: Vec<f64> = match spec.assignment {
        BlockAssignment::Contiguous => sample.values.clone(),
        BlockAssignment::Random => {
            let mut v = sample.values.clone();
            let mut rng = SeededRng::new(spec.seed, 0);
            rng.shuffle(&mut v);
            v
        }
    };

    let m = spec.block_count;
    let base = n / m;
    let larger = n % m;
    let mut maxima = Vec::with_capacity(m);
    let mut offset = 0;
    for b in 0..m {
        let size = if b < larger { base + 1 } else { base };
        let block = &values[offset..offset + size];
        maxima.push(block.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        offset += size;
    }
    Sample::new(maxima, format!("{} block maxima", sample.label))
}

/// Center the maxima on their mean and scale by their sample standard
/// deviation (divisor n-1), one shared pair for the whole sequence.
pub fn standardize_block_maxima(maxima: &Sample) -> Result<Vec<f64>> {
    let v = maxima.values();
    if v.len() < 2 {
        return Err(Error::data("standardization requires at least 2 maxima"));
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    if var == 0.0 {
        return Err(Error::data(
            "maxima are all equal; standard deviation is zero",
        ));
    }
    let sd = var.sqrt();
    Ok(v.iter().map(|x| (x - mean) / sd).collect())
}

/// Observations strictly above `threshold`, shifted down by it. Original
/// order is preserved.
pub fn exceedances(sample: &Sample, threshold: f64) -> Result<ExceedanceSet> {
    if threshold <= 0.0 || !threshold.is_finite() {
        return Err(Error::invalid(format!(
            "threshold must be positive and finite, got {threshold}"
        )));
    }
    let exceed: Vec<f64> = sample
        .values
        .iter()
        .filter(|&&x| x > threshold)
        .map(|&x| x - threshold)
        .collect();
    if exceed.is_empty() {
        return Err(Error::data(format!(
            "no observations exceed threshold {threshold} (sample maximum {})",
            sample.max()
        )));
    }
    Ok(ExceedanceSet {
        threshold,
        n_total: sample.len(),
        n_exceed: exceed.len(),
        exceedances: exceed,
    })
}

/// Hill estimates over descending order statistics:
///
/// ```text
/// ξ̂(k) = (1/k) Σ_{j=1..k} ln(X_{j,n} / X_{k+1,n}),   α̂(k) = 1/ξ̂(k)
/// ```
///
/// for k = 2..n-1. Points with ξ̂(k) <= 0 (possible only under ties at the
/// top) are omitted.
pub fn hill_series(sample: &Sample) -> Result<HillSeries> {
    let n = sample.len();
    if n < 3 {
        return Err(Error::data(format!(
            "hill series requires at least 3 observations, got {n}"
        )));
    }
    let mut sorted = sample.values.clone();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let logs: Vec<f64> = sorted.iter().map(|x| x.ln()).collect();

    let mut points = Vec::with_capacity(n - 2);
    let mut prefix = logs[0];
    for k in 2..n {
        // prefix holds Σ_{j=1..k} ln X_{j,n} after this update.
        prefix += logs[k - 1];
        let xi = prefix / k as f64 - logs[k];
        if xi > 0.0 {
            points.push((k, 1.0 / xi));
        }
    }
    Ok(HillSeries {
        points,
        order_stats: sorted,
    })
}

/// Empirical mean excess M̂(u): the average of x - u over observations
/// strictly above u.
pub fn empirical_mean_excess(sample: &Sample, u: f64) -> Result<f64> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for &x in &sample.values {
        if x > u {
            sum += x - u;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::data(format!("no observations exceed u = {u}")));
    }
    Ok(sum / count as f64)
}

/// Pick the threshold where the Hill plot stabilizes: the smallest window
/// start k whose w consecutive α̂ values satisfy (max-min)/median <= r.
/// When no window qualifies, the window minimizing the ratio is used and
/// `fallback` is set.
pub fn select_threshold(
    series: &HillSeries,
    config: &StabilityConfig,
) -> Result<ThresholdSelection> {
    let pts = &series.points;
    let w = config.window;
    if w == 0 {
        return Err(Error::invalid("stability window must be positive"));
    }
    if pts.len() < w {
        return Err(Error::data(format!(
            "hill series has {} points, needs at least the window size {w}",
            pts.len()
        )));
    }

    let ratio_at = |start: usize| -> f64 {
        let window = &pts[start..start + w];
        let mut alphas: Vec<f64> = window.iter().map(|&(_, a)| a).collect();
        alphas.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = if w % 2 == 1 {
            alphas[w / 2]
        } else {
            0.5 * (alphas[w / 2 - 1] + alphas[w / 2])
        };
        (alphas[w - 1] - alphas[0]) / median
    };

    let mut best_start = 0;
    let mut best_ratio = f64::INFINITY;
    for start in 0..=pts.len() - w {
        let ratio = ratio_at(start);
        if ratio <= config.rel_tolerance {
            return Ok(selection_at(series, start, false));
        }
        if ratio < best_ratio {
            best_ratio = ratio;
            best_start = start;
        }
    }
    Ok(selection_at(series, best_start, true))
}

fn selection_at(series: &HillSeries, start: usize, fallback: bool) -> ThresholdSelection {
    let (k, alpha) = series.points[start];
    ThresholdSelection {
        threshold: series.order_stats[k - 1],
        k,
        alpha,
        fallback,
    }
}
