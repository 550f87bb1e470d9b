//! Parametric bootstrap of the fitted median E-N curves.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::simulate::weibull_draw;
use super::{en_curve, fit, FitOptions, FitResult, LikelihoodModel, Theta};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapOptions {
    pub replicates: usize,
    pub ci_level: f64,
    pub seed: u64,
    /// Nominal strains of the curves; empty means 25 log-spaced points over
    /// the tested range.
    pub grid: Vec<f64>,
    /// Number of replicate curves exported for plotting.
    pub spaghetti: usize,
    /// Options for the replicate refits, which start from θ̂.
    pub fit: FitOptions,
}

impl Default for BootstrapOptions {
    fn default() -> Self {
        BootstrapOptions {
            replicates: 2000,
            ci_level: 0.925,
            seed: 0,
            grid: Vec::new(),
            spaghetti: 200,
            fit: FitOptions {
                starts: 1,
                restarts: 1,
                ..FitOptions::default()
            },
        }
    }
}

/// Median-life bands of one profile over the strain grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileBands {
    pub id: String,
    /// Median life under θ̂.
    pub estimate: Vec<f64>,
    /// Median over replicates.
    pub median: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterBand {
    pub name: String,
    pub estimate: f64,
    pub lower: f64,
    pub median: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaghettiCurve {
    pub replicate: usize,
    pub profile: String,
    pub cycles: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    pub replicates: usize,
    pub failures: usize,
    pub ci_level: f64,
    pub seed: u64,
    pub grid: Vec<f64>,
    pub profiles: Vec<ProfileBands>,
    pub parameters: Vec<ParameterBand>,
    pub spaghetti: Vec<SpaghettiCurve>,
    pub warnings: Vec<String>,
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 || lo == hi {
        return vec![lo; n.min(1)];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

/// Linear-interpolation percentile of sorted data (Hyndman-Fan type 7).
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

struct Replicate {
    theta: Theta,
    curves: Vec<Vec<f64>>,
}

/// Redraws every record from `Weibull(m̂, η_r(θ̂))`, keeping each censored
/// record's runout, refits, and collects per-profile median curves.
/// Replicate `i` uses the ChaCha8 stream `i` of `seed`; results are assembled
/// in replicate order, so the output does not depend on scheduling.
pub fn bootstrap(model: &LikelihoodModel, fitted: &FitResult, opts: &BootstrapOptions) -> Result<BootstrapResult> {
    if opts.replicates < 100 {
        return Err(Error::invalid(format!(
            "bootstrap needs at least 100 replicates, got {}",
            opts.replicates
        )));
    }
    if !(0.0..1.0).contains(&opts.ci_level) {
        return Err(Error::domain(format!(
            "ci_level must lie in [0, 1), got {}",
            opts.ci_level
        )));
    }
    let grid = if opts.grid.is_empty() {
        let (lo, hi) = model.dataset().strain_range();
        log_grid(lo, hi, 25)
    } else {
        opts.grid.clone()
    };
    let theta_hat = fitted.theta;
    let ctx = *model.context();
    let etas: Vec<f64> = model.record_etas(&theta_hat)?.iter().map(|e| e.eta).collect();
    let mut fit_opts = opts.fit.clone();
    fit_opts.fixed = std::array::from_fn(|i| !fitted.free[i]);
    fit_opts.parametrization = fitted.parametrization;

    let curves_for = |theta: &Theta| -> Result<Vec<Vec<f64>>> {
        model
            .profiles()
            .iter()
            .map(|p| Ok(en_curve(theta, p, 0.5, &grid, &ctx)?.iter().map(|c| c.cycles).collect()))
            .collect()
    };
    let estimate = curves_for(&theta_hat)?;

    let run = |index: usize| -> Option<Replicate> {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(index as u64);
        let obs: Vec<(f64, bool)> = model
            .dataset()
            .records()
            .iter()
            .zip(&etas)
            .map(|(r, &eta)| {
                let n = weibull_draw(&mut rng, eta, theta_hat.m).max(f64::MIN_POSITIVE);
                if r.censored && n > r.n_obs {
                    (r.n_obs, true)
                } else {
                    (n, false)
                }
            })
            .collect();
        let outcome = model
            .with_observations(&obs)
            .and_then(|m| fit(&m, &theta_hat, &fit_opts))
            .and_then(|f| {
                Ok(Replicate {
                    theta: f.theta,
                    curves: curves_for(&f.theta)?,
                })
            });
        match outcome {
            Ok(r) => Some(r),
            Err(e) => {
                log::debug!("bootstrap replicate {index} failed: {e}");
                None
            }
        }
    };
    let results: Vec<Option<Replicate>> = (0..opts.replicates).into_par_iter().map(run).collect();

    let ok: Vec<(usize, &Replicate)> = results
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.as_ref().map(|r| (i, r)))
        .collect();
    let failures = opts.replicates - ok.len();
    if ok.is_empty() {
        return Err(Error::NonConvergence("every bootstrap replicate failed".into()));
    }
    let mut warnings = Vec::new();
    if failures * 10 > opts.replicates {
        let msg = format!("{failures} of {} bootstrap replicates failed", opts.replicates);
        log::warn!("{msg}");
        warnings.push(msg);
    }

    let (p_lo, p_hi) = ((1.0 - opts.ci_level) / 2.0, (1.0 + opts.ci_level) / 2.0);
    let band = |mut v: Vec<f64>| {
        v.sort_by(f64::total_cmp);
        (percentile(&v, p_lo), percentile(&v, 0.5), percentile(&v, p_hi))
    };
    let profiles = model
        .profiles()
        .iter()
        .enumerate()
        .map(|(pi, p)| {
            let mut bands = ProfileBands {
                id: p.id.clone(),
                estimate: estimate[pi].clone(),
                median: Vec::with_capacity(grid.len()),
                lower: Vec::with_capacity(grid.len()),
                upper: Vec::with_capacity(grid.len()),
            };
            for j in 0..grid.len() {
                let (lo, med, hi) = band(ok.iter().map(|(_, r)| r.curves[pi][j]).collect());
                bands.lower.push(lo);
                bands.median.push(med);
                bands.upper.push(hi);
            }
            bands
        })
        .collect();
    let parameters = (0..7)
        .map(|k| {
            let (lower, median, upper) = band(ok.iter().map(|(_, r)| r.theta.to_array()[k]).collect());
            ParameterBand {
                name: Theta::NAMES[k].to_string(),
                estimate: theta_hat.to_array()[k],
                lower,
                median,
                upper,
            }
        })
        .collect();
    let spaghetti = ok
        .iter()
        .take(opts.spaghetti)
        .flat_map(|&(i, r)| {
            model
                .profiles()
                .iter()
                .zip(&r.curves)
                .map(move |(p, c)| SpaghettiCurve {
                    replicate: i,
                    profile: p.id.clone(),
                    cycles: c.clone(),
                })
        })
        .collect();
    Ok(BootstrapResult {
        replicates: opts.replicates,
        failures,
        ci_level: opts.ci_level,
        seed: opts.seed,
        grid,
        profiles,
        parameters,
        spaghetti,
        warnings,
    })
}
