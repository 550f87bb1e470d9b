//! Observed information and delta-method uncertainty of fitted curves.

use nalgebra::{DMatrix, DVector};

use super::{specimen_eta, FitResult, LikelihoodModel, SpecimenProfile, Theta};
use crate::error::{Error, Result};

const LOG_COORDS: [bool; 7] = [true, false, true, false, true, true, true];

fn to_log(theta: &Theta) -> [f64; 7] {
    let mut y = theta.to_array();
    for (v, log) in y.iter_mut().zip(LOG_COORDS) {
        if log {
            *v = v.ln();
        }
    }
    y
}

fn from_log(y: &[f64; 7]) -> Theta {
    let mut v = *y;
    for (v, log) in v.iter_mut().zip(LOG_COORDS) {
        if log {
            *v = v.exp();
        }
    }
    Theta::from_array(v)
}

fn step(y: f64) -> f64 {
    1e-4 * y.abs().max(1.0)
}

/// Hessian of the negative log-likelihood in log coordinates over the `free`
/// parameters, by central differences.
pub fn observed_information(model: &LikelihoodModel, theta: &Theta, free: &[bool; 7]) -> Result<DMatrix<f64>> {
    let y0 = to_log(theta);
    let idx: Vec<usize> = (0..7).filter(|&i| free[i]).collect();
    let f = |d: &[(usize, f64)]| -> Result<f64> {
        let mut y = y0;
        for &(i, h) in d {
            y[i] += h;
        }
        let v = model.neg_log_likelihood(&from_log(&y));
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::numerical("likelihood not finite near the estimate"))
        }
    };
    let n = idx.len();
    let f0 = f(&[])?;
    let mut h = DMatrix::zeros(n, n);
    for a in 0..n {
        let (i, hi) = (idx[a], step(y0[idx[a]]));
        h[(a, a)] = (f(&[(i, hi)])? - 2.0 * f0 + f(&[(i, -hi)])?) / (hi * hi);
        for b in 0..a {
            let (j, hj) = (idx[b], step(y0[idx[b]]));
            let v = (f(&[(i, hi), (j, hj)])? - f(&[(i, hi), (j, -hj)])? - f(&[(i, -hi), (j, hj)])?
                + f(&[(i, -hi), (j, -hj)])?)
                / (4.0 * hi * hj);
            h[(a, b)] = v;
            h[(b, a)] = v;
        }
    }
    Ok(h)
}

/// Delta-method standard error of the log median life of `profile` at nominal
/// strain `eps_a`, from the observed information at the fitted parameters.
pub fn median_log_std_error(
    model: &LikelihoodModel,
    fitted: &FitResult,
    profile: &SpecimenProfile,
    eps_a: f64,
) -> Result<f64> {
    let info = observed_information(model, &fitted.theta, &fitted.free)?;
    let cov = info
        .cholesky()
        .ok_or_else(|| Error::numerical("observed information is not positive definite"))?
        .inverse();
    let y0 = to_log(&fitted.theta);
    let ctx = model.context();
    let ln_median = |y: &[f64; 7]| -> Result<f64> {
        let theta = from_log(y);
        let eta = specimen_eta(profile, eps_a, &theta, ctx)?.eta;
        Ok(eta.ln() + std::f64::consts::LN_2.ln() / theta.m)
    };
    let idx: Vec<usize> = (0..7).filter(|&i| fitted.free[i]).collect();
    let mut g = DVector::zeros(idx.len());
    for (a, &i) in idx.iter().enumerate() {
        let h = step(y0[i]);
        let (mut yp, mut ym) = (y0, y0);
        yp[i] += h;
        ym[i] -= h;
        g[a] = (ln_median(&yp)? - ln_median(&ym)?) / (2.0 * h);
    }
    Ok((g.transpose() * cov * g)[(0, 0)].max(0.0).sqrt())
}
