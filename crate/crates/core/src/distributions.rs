//! The three parametric families: Lognormal, location-scale Generalized
//! Extreme Value and Generalized Pareto.
//!
//! CDFs:
//!
//! ```text
//! Lognormal(μ,σ):  F(x) = Φ((ln x - μ)/σ),                    x > 0
//! GEV(θ,m,s):      F(x) = exp(-(1 + θz)^(-1/θ)),  z=(x-m)/s,  1+θz > 0
//!                  F(x) = exp(-e^(-z))                         θ = 0
//! GPD(ξ,β):        F(x) = 1 - (1 + ξx/β)^(-1/ξ),              x ≥ 0
//!                  F(x) = 1 - e^(-x/β)                         ξ = 0
//! ```
//!
//! Shape parameters within [`SHAPE_ZERO_TOL`] of zero take the exponential
//! branches, which avoids catastrophic cancellation near θ = 0 / ξ = 0.
//! For ξ < 0 the GPD support is the closed interval [0, -β/ξ]; the CDF is
//! exactly 1 at the upper endpoint and the PDF returns the left limit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{normal_cdf, normal_pdf, normal_quantile, SeededRng};

/// |shape| below this uses the shape = 0 (Gumbel / exponential) branch.
pub const SHAPE_ZERO_TOL: f64 = 1e-9;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Lognormal parameters on the log scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LognormalParams {
    /// Log-scale location μ (reported under "Scale").
    pub mu: f64,
    /// Log-scale dispersion σ (reported under "Shape").
    pub sigma: f64,
}

impl LognormalParams {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::invalid(format!(
                "lognormal mu must be finite, got {mu}"
            )));
        }
        if sigma <= 0.0 || !sigma.is_finite() {
            return Err(Error::invalid(format!(
                "lognormal sigma must be positive and finite, got {sigma}"
            )));
        }
        Ok(LognormalParams { mu, sigma })
    }
}

/// Location-scale GEV parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GevParams {
    pub shape: f64,
    pub location: f64,
    pub scale: f64,
}

impl GevParams {
    pub fn new(shape: f64, location: f64, scale: f64) -> Result<Self> {
        if !shape.is_finite() || !location.is_finite() {
            return Err(Error::invalid("GEV shape and location must be finite"));
        }
        if scale <= 0.0 || !scale.is_finite() {
            return Err(Error::invalid(format!(
                "GEV scale must be positive and finite, got {scale}"
            )));
        }
        Ok(GevParams {
            shape,
            location,
            scale,
        })
    }
}

/// GPD parameters for exceedances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpdParams {
    pub shape: f64,
    pub scale: f64,
}

impl GpdParams {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        if !shape.is_finite() {
            return Err(Error::invalid(format!(
                "GPD shape must be finite, got {shape}"
            )));
        }
        if scale <= 0.0 || !scale.is_finite() {
            return Err(Error::invalid(format!(
                "GPD scale must be positive and finite, got {scale}"
            )));
        }
        Ok(GpdParams { shape, scale })
    }

    /// Upper support endpoint: -β/ξ for ξ < 0, +∞ otherwise.
    pub fn upper_endpoint(&self) -> f64 {
        if self.shape < -SHAPE_ZERO_TOL {
            -self.scale / self.shape
        } else {
            f64::INFINITY
        }
    }
}

/// A fitted or hypothesized model from one of the three families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DistributionModel {
    Lognormal(LognormalParams),
    Gev(GevParams),
    Gpd(GpdParams),
}

impl DistributionModel {
    pub fn lognormal(mu: f64, sigma: f64) -> Result<Self> {
        Ok(DistributionModel::Lognormal(LognormalParams::new(
            mu, sigma,
        )?))
    }

    pub fn gev(shape: f64, location: f64, scale: f64) -> Result<Self> {
        Ok(DistributionModel::Gev(GevParams::new(
            shape, location, scale,
        )?))
    }

    pub fn gpd(shape: f64, scale: f64) -> Result<Self> {
        Ok(DistributionModel::Gpd(GpdParams::new(shape, scale)?))
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            DistributionModel::Lognormal(_) => "lognormal",
            DistributionModel::Gev(_) => "gev",
            DistributionModel::Gpd(_) => "gpd",
        }
    }

    /// Number of free parameters (degrees of freedom consumed by a fit).
    pub fn param_count(&self) -> usize {
        match self {
            DistributionModel::Lognormal(_) | DistributionModel::Gpd(_) => 2,
            DistributionModel::Gev(_) => 3,
        }
    }

    /// Whether x lies in the (closed) support of the model.
    pub fn in_support(&self, x: f64) -> bool {
        match self {
            DistributionModel::Lognormal(_) => x > 0.0,
            DistributionModel::Gev(p) => {
                if p.shape.abs() < SHAPE_ZERO_TOL {
                    true
                } else {
                    1.0 + p.shape * (x - p.location) / p.scale > 0.0
                }
            }
            DistributionModel::Gpd(p) => x >= 0.0 && x <= p.upper_endpoint(),
        }
    }
}

/// Cumulative distribution function. Values outside the support clamp to
/// 0 or 1; never errors.
pub fn cdf(model: &DistributionModel, x: f64) -> f64 {
    match model {
        DistributionModel::Lognormal(p) => {
            if x <= 0.0 {
                0.0
            } else {
                normal_cdf((x.ln() - p.mu) / p.sigma)
            }
        }
        DistributionModel::Gev(p) => {
            let z = (x - p.location) / p.scale;
            if p.shape.abs() < SHAPE_ZERO_TOL {
                (-(-z).exp()).exp()
            } else {
                let w = p.shape * z;
                if w <= -1.0 {
                    // Below the lower endpoint (θ > 0) or above the upper (θ < 0).
                    if p.shape > 0.0 {
                        0.0
                    } else {
                        1.0
                    }
                } else {
                    (-(-w.ln_1p() / p.shape).exp()).exp()
                }
            }
        }
        DistributionModel::Gpd(p) => {
            if x < 0.0 {
                0.0
            } else if p.shape.abs() < SHAPE_ZERO_TOL {
                -(-x / p.scale).exp_m1()
            } else {
                let w = p.shape * x / p.scale;
                if w <= -1.0 {
                    1.0
                } else {
                    1.0 - (-w.ln_1p() / p.shape).exp()
                }
            }
        }
    }
}

/// Probability density function. Zero outside the support.
pub fn pdf(model: &DistributionModel, x: f64) -> f64 {
    match model {
        DistributionModel::Lognormal(p) => {
            if x <= 0.0 {
                0.0
            } else {
                normal_pdf((x.ln() - p.mu) / p.sigma) / (x * p.sigma)
            }
        }
        DistributionModel::Gev(p) => {
            let z = (x - p.location) / p.scale;
            if p.shape.abs() < SHAPE_ZERO_TOL {
                ((-z - (-z).exp()).exp()) / p.scale
            } else {
                let w = p.shape * z;
                if w <= -1.0 {
                    0.0
                } else {
                    let lt = w.ln_1p();
                    let outer = (-lt / p.shape).exp();
                    ((-(1.0 + 1.0 / p.shape) * lt - outer).exp()) / p.scale
                }
            }
        }
        DistributionModel::Gpd(p) => {
            if x < 0.0 {
                return 0.0;
            }
            if p.shape.abs() < SHAPE_ZERO_TOL {
                return (-x / p.scale).exp() / p.scale;
            }
            let t = 1.0 + p.shape * x / p.scale;
            if t < 0.0 {
                0.0
            } else if t == 0.0 {
                // Left limit at the upper endpoint x = -β/ξ.
                let exponent = -1.0 / p.shape - 1.0;
                if exponent > 0.0 {
                    0.0
                } else if exponent == 0.0 {
                    1.0 / p.scale
                } else {
                    f64::INFINITY
                }
            } else {
                (-(1.0 / p.shape + 1.0) * t.ln()).exp() / p.scale
            }
        }
    }
}

/// Quantile function (inverse CDF) for p in the open unit interval.
pub fn quantile(model: &DistributionModel, p: f64) -> Result<f64> {
    if p.is_nan() || p <= 0.0 || p >= 1.0 {
        return Err(Error::domain(format!(
            "quantile requires 0 < p < 1, got {p}"
        )));
    }
    Ok(match model {
        DistributionModel::Lognormal(m) => (m.mu + m.sigma * normal_quantile(p)?).exp(),
        DistributionModel::Gev(m) => {
            if m.shape.abs() < SHAPE_ZERO_TOL {
                m.location - m.scale * (-p.ln()).ln()
            } else {
                // ((-ln p)^(-θ) - 1)/θ evaluated as expm1 for small θ stability.
                m.location + m.scale * (-m.shape * (-p.ln()).ln()).exp_m1() / m.shape
            }
        }
        DistributionModel::Gpd(m) => {
            if m.shape.abs() < SHAPE_ZERO_TOL {
                -m.scale * (-p).ln_1p()
            } else {
                m.scale * (-m.shape * (-p).ln_1p()).exp_m1() / m.shape
            }
        }
    })
}

/// Sum of log densities. Returns -∞ when any observation falls outside the
/// support (the signal the optimizer uses to reject infeasible parameters).
pub fn log_likelihood(model: &DistributionModel, values: &[f64]) -> f64 {
    match model {
        DistributionModel::Lognormal(p) => {
            let mut ll = 0.0;
            for &x in values {
                if x <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                let z = (x.ln() - p.mu) / p.sigma;
                ll += -LN_SQRT_2PI - p.sigma.ln() - x.ln() - 0.5 * z * z;
            }
            ll
        }
        DistributionModel::Gev(p) => {
            let mut ll = -(values.len() as f64) * p.scale.ln();
            if p.shape.abs() < SHAPE_ZERO_TOL {
                for &x in values {
                    let z = (x - p.location) / p.scale;
                    ll += -z - (-z).exp();
                }
            } else {
                let coeff = 1.0 + 1.0 / p.shape;
                for &x in values {
                    let w = p.shape * (x - p.location) / p.scale;
                    if w <= -1.0 {
                        return f64::NEG_INFINITY;
                    }
                    let lt = w.ln_1p();
                    ll += -coeff * lt - (-lt / p.shape).exp();
                }
            }
            ll
        }
        DistributionModel::Gpd(p) => {
            let mut ll = -(values.len() as f64) * p.scale.ln();
            if p.shape.abs() < SHAPE_ZERO_TOL {
                for &y in values {
                    if y < 0.0 {
                        return f64::NEG_INFINITY;
                    }
                    ll += -y / p.scale;
                }
            } else {
                let coeff = 1.0 + 1.0 / p.shape;
                for &y in values {
                    if y < 0.0 {
                        return f64::NEG_INFINITY;
                    }
                    let t = 1.0 + p.shape * y / p.scale;
                    if t < 0.0 {
                        return f64::NEG_INFINITY;
                    }
                    if t == 0.0 {
                        // Upper endpoint: ln density is -ln β for ξ = -1,
                        // -∞ for ξ in (-1, 0) and +∞ for ξ < -1.
                        if p.shape == -1.0 {
                            continue;
                        }
                        return if p.shape > -1.0 {
                            f64::NEG_INFINITY
                        } else {
                            f64::INFINITY
                        };
                    }
                    ll += -coeff * t.ln();
                }
            }
            ll
        }
    }
}

/// Draw n observations by inverse transform on the stream's uniforms.
pub fn sample(model: &DistributionModel, n: usize, rng: &mut SeededRng) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let u = rng.next_f64();
            quantile(model, u).expect("uniform draw lies in (0, 1)")
        })
        .collect()
}
