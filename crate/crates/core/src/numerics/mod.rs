//! Self-contained numeric kernel: special functions, a derivative-free
//! simplex optimizer, a golden-section line search and a splittable
//! deterministic PRNG.
//!
//! Everything here is pure and allocation-light so the fitting and testing
//! layers above can rely on bit-for-bit reproducible results.

mod optimize;
mod rng;
mod special;

pub use optimize::{golden_section_max, nelder_mead, nelder_mead_simplex, OptimizerResult};
pub use rng::SeededRng;
pub use special::{
    erf, erfc, kolmogorov_sf, ln_gamma, normal_cdf, normal_pdf, normal_quantile,
    regularized_lower_gamma,
};
