//! Special functions: error function, normal CDF/quantile, regularized
//! incomplete gamma and the Kolmogorov survival function.
//!
//! All routines are double-precision rational/series evaluations with no
//! external dependencies. Coefficients keep their full published digits.
#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

// Cody's rational Chebyshev approximations for erf/erfc (SPECFUN "calerf").
// Relative error below 1.2e-16 across the three regions.
const ERF_A: [f64; 5] = [
    3.16112374387056560e0,
    1.13864154151050156e2,
    3.77485237685302021e2,
    3.20937758913846947e3,
    1.85777706184603153e-1,
];
const ERF_B: [f64; 4] = [
    2.36012909523441209e1,
    2.44024637934444173e2,
    1.28261652607737228e3,
    2.84423683343917062e3,
];
const ERF_C: [f64; 9] = [
    5.64188496988670089e-1,
    8.88314979438837594e0,
    6.61191906371416295e1,
    2.98635138197400131e2,
    8.81952221241769090e2,
    1.71204761263407058e3,
    2.05107837782607147e3,
    1.23033935479799725e3,
    2.15311535474403846e-8,
];
const ERF_D: [f64; 8] = [
    1.57449261107098347e1,
    1.17693950891312499e2,
    5.37181101862009858e2,
    1.62138957456669019e3,
    3.29079923573345963e3,
    4.36261909014324716e3,
    3.43936767414372164e3,
    1.23033935480374942e3,
];
const ERF_P: [f64; 6] = [
    3.05326634961232344e-1,
    3.60344899949804439e-1,
    1.25781726111229246e-1,
    1.60837851487422766e-2,
    6.58749161529837803e-4,
    1.63153871373020978e-2,
];
const ERF_Q: [f64; 5] = [
    2.56852019228982242e0,
    1.87295284992346047e0,
    5.27905102951428412e-1,
    6.05183413124413191e-2,
    2.33520497626869185e-3,
];
const ERF_THRESH: f64 = 0.46875;
const ONE_OVER_SQRT_PI: f64 = 5.641_895_835_477_563e-1;

/// erf(x) for |x| <= 0.46875 via the central rational approximation.
fn erf_small(x: f64) -> f64 {
    let y = x.abs();
    let ysq = if y > 1.11e-16 { y * y } else { 0.0 };
    let mut xnum = ERF_A[4] * ysq;
    let mut xden = ysq;
    for i in 0..3 {
        xnum = (xnum + ERF_A[i]) * ysq;
        xden = (xden + ERF_B[i]) * ysq;
    }
    x * (xnum + ERF_A[3]) / (xden + ERF_B[3])
}

/// erfc(y) for y >= 0.46875. The exponential is split as
/// exp(-y^2) = exp(-t^2)·exp(-(y-t)(y+t)) with t = trunc(16y)/16 to avoid
/// cancellation in the argument.
fn erfc_large(y: f64) -> f64 {
    let raw = if y <= 4.0 {
        let mut xnum = ERF_C[8] * y;
        let mut xden = y;
        for i in 0..7 {
            xnum = (xnum + ERF_C[i]) * y;
            xden = (xden + ERF_D[i]) * y;
        }
        (xnum + ERF_C[7]) / (xden + ERF_D[7])
    } else if y < 26.543 {
        let ysq = 1.0 / (y * y);
        let mut xnum = ERF_P[5] * ysq;
        let mut xden = ysq;
        for i in 0..3 {
            xnum = (xnum + ERF_P[i]) * ysq;
            xden = (xden + ERF_Q[i]) * ysq;
        }
        let r = ysq * (xnum + ERF_P[4]) / (xden + ERF_Q[4]);
        (ONE_OVER_SQRT_PI - r) / y
    } else {
        return 0.0;
    };
    let t = (y * 16.0).trunc() / 16.0;
    let del = (y - t) * (y + t);
    (-t * t).exp() * (-del).exp() * raw
}

/// Error function.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let y = x.abs();
    if y <= ERF_THRESH {
        erf_small(x)
    } else {
        let e = 1.0 - erfc_large(y);
        if x < 0.0 {
            -e
        } else {
            e
        }
    }
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let y = x.abs();
    let c = if y <= ERF_THRESH {
        1.0 - erf_small(x.abs())
    } else {
        erfc_large(y)
    };
    if x < 0.0 {
        2.0 - c
    } else {
        c
    }
}

/// Standard normal CDF Φ(z). Saturates to exactly 0/1 in the far tails.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

/// Standard normal density φ(z).
pub fn normal_pdf(z: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * z * z).exp()
}

// Wichura's AS 241 (PPND16) rational approximations for the normal quantile.
const PPND_A: [f64; 8] = [
    3.3871328727963666080e0,
    1.3314166789178437745e2,
    1.9715909503065514427e3,
    1.3731693765509461125e4,
    4.5921953931549871457e4,
    6.7265770927008700853e4,
    3.3430575583588128105e4,
    2.5090809287301226727e3,
];
const PPND_B: [f64; 7] = [
    4.2313330701600911252e1,
    6.8718700749205790830e2,
    5.3941960214247511077e3,
    2.1213794301586595867e4,
    3.9307895800092710610e4,
    2.8729085735721942674e4,
    5.2264952788528545610e3,
];
const PPND_C: [f64; 8] = [
    1.42343711074968357734e0,
    4.63033784615654529590e0,
    5.76949722146069140550e0,
    3.64784832476320460504e0,
    1.27045825245236838258e0,
    2.41780725177450611770e-1,
    2.27238449892691845833e-2,
    7.74545014278341407640e-4,
];
const PPND_D: [f64; 7] = [
    2.05319162663775882187e0,
    1.67638483018380384940e0,
    6.89767334985100004550e-1,
    1.48103976427480074590e-1,
    1.51986665636164571966e-2,
    5.47593808499534494600e-4,
    1.05075007164441684324e-9,
];
const PPND_E: [f64; 8] = [
    6.65790464350110377720e0,
    5.46378491116411436990e0,
    1.78482653991729133580e0,
    2.96560571828504891230e-1,
    2.65321895265761230930e-2,
    1.24266094738807843860e-3,
    2.71155556874348757815e-5,
    2.01033439929228813265e-7,
];
const PPND_F: [f64; 7] = [
    5.99832206555887937690e-1,
    1.36929880922735805310e-1,
    1.48753612908506148525e-2,
    7.86869131145613259100e-4,
    1.84631831751005468180e-5,
    1.42151175831644588870e-7,
    2.04426310338993978564e-15,
];

fn ppnd_ratio(num: &[f64; 8], den: &[f64; 7], r: f64) -> f64 {
    let mut n = num[7];
    for c in num[..7].iter().rev() {
        n = n * r + c;
    }
    let mut d = den[6];
    for c in den[..6].iter().rev() {
        d = d * r + c;
    }
    n / (d * r + 1.0)
}

/// Standard normal quantile Φ⁻¹(p), refined with one Newton step against
/// [`normal_cdf`] so the round trip holds to better than 1e-9.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if p.is_nan() || p <= 0.0 || p >= 1.0 {
        return Err(Error::domain(format!(
            "normal_quantile requires 0 < p < 1, got {p}"
        )));
    }
    // Work on the smaller tail so the Newton refinement keeps the relative
    // accuracy of erfc; mirror the result for p > 1/2.
    let (tail, sign) = if p <= 0.5 { (p, 1.0) } else { (1.0 - p, -1.0) };
    let q = tail - 0.5;
    let mut x = if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        q * ppnd_ratio(&PPND_A, &PPND_B, r)
    } else {
        let mut r = (-tail.ln()).sqrt();
        if r <= 5.0 {
            r -= 1.6;
            -ppnd_ratio(&PPND_C, &PPND_D, r)
        } else {
            r -= 5.0;
            -ppnd_ratio(&PPND_E, &PPND_F, r)
        }
    };
    let dens = normal_pdf(x);
    if dens > 1e-280 {
        x -= (normal_cdf(x) - tail) / dens;
    }
    Ok(sign * x)
}

// Lanczos approximation, g = 7, 9 coefficients.
const LANCZOS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

/// Natural log of the gamma function for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection: Γ(x)Γ(1-x) = π / sin(πx)
        let s = (std::f64::consts::PI * x).sin();
        std::f64::consts::PI.ln() - s.ln() - ln_gamma(1.0 - x)
    } else {
        let z = x - 1.0;
        let mut acc = LANCZOS[0];
        for (i, c) in LANCZOS.iter().enumerate().skip(1) {
            acc += c / (z + i as f64);
        }
        let t = z + 7.5;
        0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
    }
}

/// Regularized lower incomplete gamma P(a, x) = γ(a, x) / Γ(a).
///
/// Series expansion for x < a + 1, Lentz continued fraction otherwise;
/// absolute error below 1e-10 for a in the test range.
pub fn regularized_lower_gamma(a: f64, x: f64) -> Result<f64> {
    if a <= 0.0 || a.is_nan() {
        return Err(Error::domain(format!(
            "regularized_lower_gamma requires a > 0, got {a}"
        )));
    }
    if x < 0.0 || x.is_nan() {
        return Err(Error::domain(format!(
            "regularized_lower_gamma requires x >= 0, got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let log_prefix = -x + a * x.ln() - ln_gamma(a);
    let p = if x < a + 1.0 {
        // P(a,x) = e^{-x} x^a / Γ(a) · Σ_{n≥0} x^n / (a(a+1)…(a+n))
        let mut ap = a;
        let mut term = 1.0 / a;
        let mut sum = term;
        for _ in 0..10_000 {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-16 {
                break;
            }
        }
        sum * log_prefix.exp()
    } else {
        // Q(a,x) via modified Lentz on the standard continued fraction.
        const TINY: f64 = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        1.0 - log_prefix.exp() * h
    };
    Ok(p.clamp(0.0, 1.0))
}

/// Kolmogorov survival function Q(t) = 2 Σ_{k≥1} (-1)^{k-1} exp(-2 k² t²).
///
/// The alternating series is truncated once terms drop below 1e-16 and
/// the result is clamped to [0, 1]. Below t = 0.175 the survival
/// probability is 1 to double precision.
pub fn kolmogorov_sf(t: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    if t < 0.175 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100_000u64 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * t * t).exp();
        sum += sign * term;
        if term < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}
