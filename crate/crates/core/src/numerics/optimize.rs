//! Derivative-free optimization: Nelder-Mead simplex minimization and a
//! golden-section line search (maximization).

use crate::error::{Error, Result};

/// Outcome of a simplex search.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerResult {
    /// Best parameter vector found.
    pub argmin: Vec<f64>,
    /// Objective value at `argmin`.
    pub objective_value: f64,
    /// Iterations performed.
    pub iterations: usize,
    /// True when both the simplex diameter and the objective spread fell
    /// below the tolerance before `max_iter` was reached.
    pub converged: bool,
}

// Standard coefficients: reflection 1, expansion 2, contraction 1/2, shrink 1/2.
const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

fn eval(objective: &mut impl FnMut(&[f64]) -> f64, x: &[f64]) -> f64 {
    let f = objective(x);
    if f.is_nan() {
        f64::INFINITY
    } else {
        f
    }
}

/// Nelder-Mead from a starting point. The initial simplex steps each
/// coordinate by 5% of its magnitude (0.00025 for zero coordinates).
pub fn nelder_mead(
    mut objective: impl FnMut(&[f64]) -> f64,
    start: &[f64],
    tolerance: f64,
    max_iter: usize,
) -> Result<OptimizerResult> {
    if start.is_empty() {
        return Err(Error::invalid("nelder_mead requires a nonempty start"));
    }
    let mut simplex = Vec::with_capacity(start.len() + 1);
    simplex.push(start.to_vec());
    for i in 0..start.len() {
        let mut v = start.to_vec();
        v[i] += if v[i] != 0.0 {
            0.05 * v[i].abs()
        } else {
            0.00025
        };
        simplex.push(v);
    }
    nelder_mead_simplex(&mut objective, simplex, tolerance, max_iter)
}

/// Nelder-Mead minimization from an explicit initial simplex of n+1
/// vertices in n dimensions. Fully deterministic: ties keep insertion
/// order, so the result depends only on the inputs.
pub fn nelder_mead_simplex(
    mut objective: impl FnMut(&[f64]) -> f64,
    simplex: Vec<Vec<f64>>,
    tolerance: f64,
    max_iter: usize,
) -> Result<OptimizerResult> {
    if tolerance <= 0.0 || tolerance.is_nan() {
        return Err(Error::invalid("nelder_mead tolerance must be > 0"));
    }
    let dim = simplex
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::invalid("nelder_mead requires a nonempty simplex"))?;
    if dim == 0 || simplex.len() != dim + 1 || simplex.iter().any(|v| v.len() != dim) {
        return Err(Error::invalid(
            "nelder_mead simplex must have n+1 vertices of dimension n",
        ));
    }

    let mut verts: Vec<(Vec<f64>, f64)> = simplex
        .into_iter()
        .map(|v| {
            let f = eval(&mut objective, &v);
            (v, f)
        })
        .collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        verts.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("objective produced NaN"));

        let diameter = verts[1..]
            .iter()
            .map(|(v, _)| {
                v.iter()
                    .zip(&verts[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max)
            })
            .fold(0.0f64, f64::max);
        let spread = verts[dim].1 - verts[0].1;
        if diameter < tolerance && spread < tolerance {
            converged = true;
            break;
        }
        iterations += 1;

        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; dim];
        for (v, _) in &verts[..dim] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x;
            }
        }
        for c in &mut centroid {
            *c /= dim as f64;
        }

        let worst = verts[dim].0.clone();
        let f_best = verts[0].1;
        let f_second_worst = verts[dim - 1].1;
        let f_worst = verts[dim].1;

        let reflected: Vec<f64> = centroid
            .iter()
            .zip(&worst)
            .map(|(c, w)| c + REFLECT * (c - w))
            .collect();
        let f_reflected = eval(&mut objective, &reflected);

        if f_reflected < f_best {
            let expanded: Vec<f64> = centroid
                .iter()
                .zip(&reflected)
                .map(|(c, r)| c + EXPAND * (r - c))
                .collect();
            let f_expanded = eval(&mut objective, &expanded);
            verts[dim] = if f_expanded < f_reflected {
                (expanded, f_expanded)
            } else {
                (reflected, f_reflected)
            };
        } else if f_reflected < f_second_worst {
            verts[dim] = (reflected, f_reflected);
        } else if f_reflected < f_worst {
            // Outside contraction.
            let contracted: Vec<f64> = centroid
                .iter()
                .zip(&reflected)
                .map(|(c, r)| c + CONTRACT * (r - c))
                .collect();
            let f_contracted = eval(&mut objective, &contracted);
            if f_contracted <= f_reflected {
                verts[dim] = (contracted, f_contracted);
            } else {
                shrink(&mut verts, &mut objective);
            }
        } else {
            // Inside contraction.
            let contracted: Vec<f64> = centroid
                .iter()
                .zip(&worst)
                .map(|(c, w)| c + CONTRACT * (w - c))
                .collect();
            let f_contracted = eval(&mut objective, &contracted);
            if f_contracted < f_worst {
                verts[dim] = (contracted, f_contracted);
            } else {
                shrink(&mut verts, &mut objective);
            }
        }
    }

    verts.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("objective produced NaN"));
    let (argmin, objective_value) = verts.swap_remove(0);
    Ok(OptimizerResult {
        argmin,
        objective_value,
        iterations,
        converged,
    })
}

fn shrink(verts: &mut [(Vec<f64>, f64)], objective: &mut impl FnMut(&[f64]) -> f64) {
    let best = verts[0].0.clone();
    for (v, f) in verts.iter_mut().skip(1) {
        for (x, b) in v.iter_mut().zip(&best) {
            *x = b + SHRINK * (*x - b);
        }
        *f = eval(objective, v);
    }
}

/// Golden-section search for the maximizer of a unimodal function on
/// [lo, hi]. Returns an abscissa within `tolerance` of the maximizer.
pub fn golden_section_max(
    mut objective: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    tolerance: f64,
) -> Result<f64> {
    if lo >= hi || lo.is_nan() || hi.is_nan() {
        return Err(Error::domain(format!(
            "golden_section_max requires lo < hi, got [{lo}, {hi}]"
        )));
    }
    if tolerance <= 0.0 || tolerance.is_nan() {
        return Err(Error::invalid("golden_section_max tolerance must be > 0"));
    }
    let invphi = (5.0f64.sqrt() - 1.0) / 2.0;
    let invphi2 = (3.0 - 5.0f64.sqrt()) / 2.0;

    let mut a = lo;
    let mut b = hi;
    let mut h = b - a;
    if h <= tolerance {
        return Ok(0.5 * (a + b));
    }
    let steps = ((tolerance / h).ln() / invphi.ln()).ceil() as usize;
    let mut c = a + invphi2 * h;
    let mut d = a + invphi * h;
    let mut fc = objective(c);
    let mut fd = objective(d);
    for _ in 0..steps {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            h *= invphi;
            c = a + invphi2 * h;
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            h *= invphi;
            d = a + invphi * h;
            fd = objective(d);
        }
    }
    Ok(0.5 * (a + b))
}
