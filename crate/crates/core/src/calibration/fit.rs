//! Multi-start maximum-likelihood fit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{nelder_mead, LikelihoodModel, NelderMeadOptions, Theta};
use crate::error::{Error, Result};

/// Coordinates the simplex works in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parametrization {
    /// `(ln σ'f, b, ln ε'f, c, ln A, ln k, ln m)`.
    #[default]
    Log,
    /// θ itself; bounds are enforced by the likelihood's `+∞` wall.
    Raw,
}

const LOG_COORDS: [bool; 7] = [true, false, true, false, true, true, true];

impl Parametrization {
    fn forward(self, theta: &Theta) -> [f64; 7] {
        let mut y = theta.to_array();
        if self == Parametrization::Log {
            for (v, log) in y.iter_mut().zip(LOG_COORDS) {
                if log {
                    *v = v.ln();
                }
            }
        }
        y
    }

    fn inverse(self, y: &[f64; 7]) -> Theta {
        let mut v = *y;
        if self == Parametrization::Log {
            for (v, log) in v.iter_mut().zip(LOG_COORDS) {
                if log {
                    *v = v.exp();
                }
            }
        }
        Theta::from_array(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    /// Number of starts; the first is θ0 itself, the rest are jittered copies.
    pub starts: usize,
    pub seed: u64,
    /// Half-width of the uniform start perturbation, relative to each
    /// transformed coordinate.
    pub jitter: f64,
    /// Simplex restarts from the best vertex after the first convergence.
    pub restarts: usize,
    /// Parameters held at their θ0 values, in [`Theta::NAMES`] order.
    pub fixed: [bool; 7],
    pub parametrization: Parametrization,
    pub nelder_mead: NelderMeadOptions,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            starts: 5,
            seed: 0,
            jitter: 0.1,
            restarts: 3,
            fixed: [false; 7],
            parametrization: Parametrization::Log,
            nelder_mead: NelderMeadOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartSummary {
    pub start: Theta,
    pub theta: Theta,
    pub neg_log_likelihood: f64,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub theta: Theta,
    pub converged: bool,
    pub neg_log_likelihood: f64,
    /// Value at θ0.
    pub initial_neg_log_likelihood: f64,
    /// Simplex iterations of the selected start, restarts included.
    pub iterations: usize,
    /// Objective evaluations over all starts.
    pub evaluations: usize,
    pub best_start: usize,
    pub starts: Vec<StartSummary>,
    /// Parameters that were fitted, in [`Theta::NAMES`] order.
    pub free: [bool; 7],
    pub parametrization: Parametrization,
    pub seed: u64,
    pub warnings: Vec<String>,
}

/// Fits θ by minimizing the negative log-likelihood from `theta0`.
///
/// Without any record on a profile with χ > 0, A and k do not enter the
/// likelihood; they are then held at their θ0 values and a warning is added.
/// The best converged start is returned; if no start converges the error
/// carries the best result found.
pub fn fit(model: &LikelihoodModel, theta0: &Theta, opts: &FitOptions) -> Result<FitResult> {
    if model.dataset().failures() == 0 {
        return Err(Error::invalid("fitting needs at least one uncensored record"));
    }
    if opts.starts == 0 {
        return Err(Error::invalid("at least one start is required"));
    }
    let f0 = model.neg_log_likelihood(theta0);
    if !f0.is_finite() {
        let detail = match model.try_neg_log_likelihood(theta0) {
            Err(e) => e.to_string(),
            Ok(_) => "parameters out of bounds".to_string(),
        };
        return Err(Error::domain(format!("initial parameters are infeasible: {detail}")));
    }

    let mut fixed = opts.fixed;
    let mut warnings = Vec::new();
    if !model.has_gradient_data() && !(fixed[4] && fixed[5]) {
        fixed[4] = true;
        fixed[5] = true;
        let msg = format!(
            "no record uses a profile with chi > 0, so A and k are not identifiable; \
             they are held at A = {}, k = {}",
            theta0.a, theta0.k
        );
        log::warn!("{msg}");
        warnings.push(msg);
    }
    let free: [bool; 7] = std::array::from_fn(|i| !fixed[i]);
    let pz = opts.parametrization;
    let y0 = pz.forward(theta0);
    for i in 0..7 {
        if free[i] && !y0[i].is_finite() {
            return Err(Error::domain(format!(
                "{} = {} cannot be fitted in log coordinates; fix it or start from a positive value",
                Theta::NAMES[i],
                theta0.to_array()[i]
            )));
        }
    }
    let free_idx: Vec<usize> = (0..7).filter(|&i| free[i]).collect();
    if free_idx.is_empty() {
        return Err(Error::invalid("all parameters are fixed"));
    }

    let expand = |x: &[f64]| {
        let mut y = y0;
        for (&i, &v) in free_idx.iter().zip(x) {
            y[i] = v;
        }
        pz.inverse(&y)
    };
    let objective = |x: &[f64]| model.neg_log_likelihood(&expand(x));

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut starts = Vec::with_capacity(opts.starts);
    let mut evaluations = 0;
    let mut best: Option<(usize, usize)> = None;
    let mut best_any = 0;
    for s in 0..opts.starts {
        let x_start: Vec<f64> = if s == 0 {
            free_idx.iter().map(|&i| y0[i]).collect()
        } else {
            match jittered_start(&mut rng, &free_idx, &y0, opts.jitter, objective) {
                Some(x) => x,
                None => {
                    log::debug!("start {s}: no feasible jittered point, skipped");
                    continue;
                }
            }
        };
        let mut r = nelder_mead(objective, &x_start, &opts.nelder_mead)?;
        evaluations += r.evaluations;
        let mut iterations = r.iterations;
        for _ in 0..opts.restarts {
            let again = nelder_mead(objective, &r.x, &opts.nelder_mead)?;
            evaluations += again.evaluations;
            iterations += again.iterations;
            let improved = r.f - again.f > opts.nelder_mead.f_tol;
            let converged = again.converged;
            if again.f <= r.f {
                r = again;
            }
            r.converged = converged;
            if !improved {
                break;
            }
        }
        starts.push(StartSummary {
            start: expand(&x_start),
            theta: expand(&r.x),
            neg_log_likelihood: r.f,
            converged: r.converged,
            iterations,
        });
        let idx = starts.len() - 1;
        if starts[idx].neg_log_likelihood < starts[best_any].neg_log_likelihood {
            best_any = idx;
        }
        if r.converged && best.map_or(true, |(b, _)| r.f < starts[b].neg_log_likelihood) {
            best = Some((idx, iterations));
        }
    }

    let (chosen, converged) = match best {
        Some((b, _)) => (b, true),
        None => (best_any, false),
    };
    let pick = &starts[chosen];
    if converged && starts[best_any].neg_log_likelihood < pick.neg_log_likelihood {
        warnings.push(format!(
            "a non-converged start reached a lower value ({}) than the selected one ({})",
            starts[best_any].neg_log_likelihood, pick.neg_log_likelihood
        ));
    }
    let result = FitResult {
        theta: pick.theta,
        converged,
        neg_log_likelihood: pick.neg_log_likelihood,
        initial_neg_log_likelihood: f0,
        iterations: pick.iterations,
        evaluations,
        best_start: chosen,
        starts: starts.clone(),
        free,
        parametrization: pz,
        seed: opts.seed,
        warnings,
    };
    if !converged {
        return Err(Error::FitNotConverged(Box::new(result)));
    }
    Ok(result)
}

fn jittered_start(
    rng: &mut ChaCha8Rng,
    free_idx: &[usize],
    y0: &[f64; 7],
    jitter: f64,
    objective: impl Fn(&[f64]) -> f64,
) -> Option<Vec<f64>> {
    for _ in 0..20 {
        let x: Vec<f64> = free_idx
            .iter()
            .map(|&i| y0[i] * (1.0 + jitter * rng.random_range(-1.0..=1.0)))
            .collect();
        if objective(&x).is_finite() {
            return Some(x);
        }
    }
    None
}
