//! Derivative-free simplex minimization.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    /// Initial step per coordinate, relative to the coordinate value.
    pub initial_scale: f64,
    /// Initial step for coordinates that start at zero.
    pub zero_step: f64,
    /// Simplex diameter tolerance, relative to `max(1, |x_best|_∞)`.
    pub x_tol: f64,
    /// Absolute tolerance on the spread of vertex values.
    pub f_tol: f64,
    pub max_iter: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            initial_scale: 0.05,
            zero_step: 0.00025,
            x_tol: 1e-9,
            f_tol: 1e-10,
            max_iter: 5000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Best value among the initial simplex vertices.
    pub initial_f: f64,
}

const ALPHA: f64 = 1.0;
const GAMMA: f64 = 2.0;
const RHO: f64 = 0.5;
const SIGMA: f64 = 0.5;

/// Minimizes `f` from `x0` with reflection 1, expansion 2, contractions 0.5 and
/// shrink 0.5. NaN values count as `+∞`. Hitting `max_iter` returns the best
/// vertex with `converged = false`.
pub fn nelder_mead(mut f: impl FnMut(&[f64]) -> f64, x0: &[f64], opts: &NelderMeadOptions) -> Result<NelderMeadResult> {
    let n = x0.len();
    if n == 0 {
        return Err(Error::invalid("nelder_mead needs at least one coordinate"));
    }
    let mut evaluations = 0;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let f0 = eval(x0);
    if !f0.is_finite() {
        return Err(Error::domain("objective is not finite at the starting point"));
    }
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), f0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += if x0[i] != 0.0 {
            opts.initial_scale * x0[i]
        } else {
            opts.zero_step
        };
        let v = eval(&x);
        simplex.push((x, v));
    }
    let order = |s: &mut Vec<(Vec<f64>, f64)>| s.sort_by(|a, b| a.1.total_cmp(&b.1));
    order(&mut simplex);
    let initial_f = simplex[0].1;

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        if is_converged(&simplex, opts) {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi;
            }
        }
        centroid.iter_mut().for_each(|c| *c /= n as f64);
        let along =
            |t: f64, worst: &[f64]| -> Vec<f64> { centroid.iter().zip(worst).map(|(c, w)| c + t * (c - w)).collect() };

        let worst = simplex[n].0.clone();
        let f_best = simplex[0].1;
        let f_second = simplex[n - 1].1;
        let f_worst = simplex[n].1;

        let xr = along(ALPHA, &worst);
        let fr = eval(&xr);
        if fr < f_best {
            let xe = along(ALPHA * GAMMA, &worst);
            let fe = eval(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < f_second {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < f_worst {
                let xc = along(ALPHA * RHO, &worst);
                let fc = eval(&xc);
                (xc, fc)
            } else {
                let xc = along(-RHO, &worst);
                let fc = eval(&xc);
                (xc, fc)
            };
            if fc < fr.min(f_worst) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for (x, v) in simplex.iter_mut().skip(1) {
                    for (xi, bi) in x.iter_mut().zip(&best) {
                        *xi = bi + SIGMA * (*xi - bi);
                    }
                    *v = eval(x);
                }
            }
        }
        order(&mut simplex);
    }
    if !converged && is_converged(&simplex, opts) {
        converged = true;
    }
    let (x, fx) = simplex.swap_remove(0);
    Ok(NelderMeadResult {
        x,
        f: fx,
        iterations,
        evaluations,
        converged,
        initial_f,
    })
}

fn is_converged(simplex: &[(Vec<f64>, f64)], opts: &NelderMeadOptions) -> bool {
    let (best, f_best) = (&simplex[0].0, simplex[0].1);
    let spread = simplex.last().unwrap().1 - f_best;
    if !(spread <= opts.f_tol) {
        return false;
    }
    let scale = best.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let diameter = simplex[1..]
        .iter()
        .flat_map(|(x, _)| x.iter().zip(best).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max);
    diameter <= opts.x_tol * scale
}
