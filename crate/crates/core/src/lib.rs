//! Heavy-tail distribution fitting for univariate positive data.
//!
//! The crate fits Lognormal, Generalized Extreme Value (GEV) and
//! Generalized Pareto (GPD) distributions to series such as monthly
//! insurance premiums via maximum likelihood, using the block-maxima and
//! peak-over-threshold pipelines of extreme value theory. It ships tail
//! diagnostics (exponential QQ, Zipf, mean-excess and Hill series),
//! Kolmogorov-Smirnov / Chi-square / Anderson-Darling goodness-of-fit
//! tests with parametric-bootstrap p-values, and a CLI that ingests CSV
//! premium data and emits per-family report tables plus plot-data files.
//!
//! Layering, bottom up:
//!
//! - [`numerics`]: special functions, Nelder-Mead, golden-section search,
//!   splittable PRNG. No dependencies.
//! - [`distributions`]: the three parametric families (CDF/PDF/quantile/
//!   log-likelihood/sampling).
//! - [`extremes`]: block maxima, exceedances, Hill series, mean excess,
//!   threshold selection.
//! - [`estimation`]: maximum-likelihood fits and the two extreme-value
//!   pipelines.
//! - [`gof`]: the three tests and bootstrap p-values.
//! - [`diagnostics`]: plot-data series builders.
//! - [`report`]: CSV ingestion, per-company analysis, table/plot emission.

pub mod diagnostics;
pub mod distributions;
pub mod error;
pub mod estimation;
pub mod extremes;
pub mod gof;
pub mod numerics;
pub mod report;
pub mod synth;

pub use error::{Error, Result};
