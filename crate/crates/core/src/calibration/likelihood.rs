//! Specimen Weibull scales and the censored Weibull negative log-likelihood.

use serde::{Deserialize, Serialize};

use super::{FatigueDataset, FitContext, ProfileShape, SpecimenProfile, Theta};
use crate::error::{Error, Result};
use crate::field_ops::{strain_amplitude, PlasticityRule};
use crate::reliability::{weibull_scale, ScaleError};
use crate::strain_life::{solve_cmb, solve_cmb_notched, SolveStatus};
use crate::sum::CompensatedSum;

/// Weibull scale of one specimen at one load level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecimenEta {
    pub eta: f64,
    /// Profile rows whose deterministic life hit the cap.
    pub capped_rows: usize,
    pub rows: usize,
}

impl SpecimenEta {
    pub fn all_capped(&self) -> bool {
        self.capped_rows == self.rows
    }
}

/// `η = (Σ_i dA_i N_det(κ_i ε, χ_i)^{-m})^{-1/m}`; for a uniform profile
/// `η = N_det(ε) · Area^{-1/m}`.
///
/// Tabulated rows scale the nominal strain by κ_i and then apply the context's
/// plasticity rule; a uniform gauge section uses the applied strain as is.
pub fn specimen_eta(
    profile: &SpecimenProfile,
    eps_nominal: f64,
    theta: &Theta,
    ctx: &FitContext,
) -> Result<SpecimenEta> {
    if !(eps_nominal > 0.0) || !eps_nominal.is_finite() {
        return Err(Error::domain(format!(
            "nominal strain must be positive, got {eps_nominal}"
        )));
    }
    if !theta.in_bounds() {
        return Err(Error::domain(format!("parameters out of bounds: {theta:?}")));
    }
    let cmb = theta.cmb(ctx.e_modulus);
    match &profile.shape {
        ProfileShape::Uniform { area } => {
            let sol = solve_cmb(eps_nominal, &cmb, ctx.n_cap)?;
            Ok(SpecimenEta {
                eta: sol.cycles * area.powf(-1.0 / theta.m),
                capped_rows: usize::from(sol.status == SolveStatus::Capped),
                rows: 1,
            })
        }
        ProfileShape::Tabulated { rows } => {
            let notch = theta.notch();
            let mut lives = Vec::with_capacity(rows.len());
            let mut capped_rows = 0;
            for r in rows {
                let elastic = r.kappa * eps_nominal;
                let local = match ctx.plasticity {
                    PlasticityRule::Elastic => elastic,
                    rule => strain_amplitude(elastic * ctx.e_modulus, ctx.e_modulus, rule)?,
                };
                let sol = solve_cmb_notched(local, r.chi, &cmb, &notch, ctx.n_cap)?;
                capped_rows += usize::from(sol.status == SolveStatus::Capped);
                lives.push((sol.cycles, r.area));
            }
            let eta = weibull_scale(lives.iter().copied(), theta.m).map_err(|e| match e {
                ScaleError::BadTerm(i) | ScaleError::NonPositiveLife(i) => {
                    Error::numerical(format!("profile {}, row {i}: non-finite hazard term", profile.id))
                }
                _ => Error::numerical(format!("profile {}: degenerate hazard sum", profile.id)),
            })?;
            Ok(SpecimenEta {
                eta,
                capped_rows,
                rows: rows.len(),
            })
        }
    }
}

/// One point of an E-N curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub eps_a: f64,
    pub cycles: f64,
}

/// Life quantile `n_p = η(ε) (-ln(1-p))^{1/m}` of a profile over a strain grid.
pub fn en_curve(
    theta: &Theta,
    profile: &SpecimenProfile,
    p: f64,
    grid: &[f64],
    ctx: &FitContext,
) -> Result<Vec<CurvePoint>> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("quantile must lie in (0, 1), got {p}")));
    }
    let factor = (-(-p).ln_1p()).powf(1.0 / theta.m);
    grid.iter()
        .map(|&eps_a| {
            let eta = specimen_eta(profile, eps_a, theta, ctx)?.eta;
            Ok(CurvePoint {
                eps_a,
                cycles: eta * factor,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Observation {
    level: usize,
    n_obs: f64,
    censored: bool,
}

/// A dataset bound to its profiles. Records sharing a profile and strain share
/// one scale evaluation.
#[derive(Debug, Clone)]
pub struct LikelihoodModel {
    profiles: Vec<SpecimenProfile>,
    /// (profile index, nominal strain) per distinct load level.
    levels: Vec<(usize, f64)>,
    observations: Vec<Observation>,
    dataset: FatigueDataset,
    ctx: FitContext,
}

impl LikelihoodModel {
    pub fn new(dataset: &FatigueDataset, profiles: &[SpecimenProfile], ctx: FitContext) -> Result<Self> {
        let mut levels: Vec<(usize, f64)> = Vec::new();
        let mut observations = Vec::with_capacity(dataset.len());
        for (i, r) in dataset.records().iter().enumerate() {
            let Some(pi) = profiles.iter().position(|p| p.id == r.profile_id) else {
                return Err(Error::invalid(format!(
                    "record {} references profile {}, which is not defined",
                    i + 1,
                    r.profile_id
                )));
            };
            let level = match levels.iter().position(|&(p, e)| p == pi && e == r.eps_a) {
                Some(l) => l,
                None => {
                    levels.push((pi, r.eps_a));
                    levels.len() - 1
                }
            };
            observations.push(Observation {
                level,
                n_obs: r.n_obs,
                censored: r.censored,
            });
        }
        Ok(LikelihoodModel {
            profiles: profiles.to_vec(),
            levels,
            observations,
            dataset: dataset.clone(),
            ctx,
        })
    }

    pub fn profiles(&self) -> &[SpecimenProfile] {
        &self.profiles
    }

    pub fn dataset(&self) -> &FatigueDataset {
        &self.dataset
    }

    pub fn context(&self) -> &FitContext {
        &self.ctx
    }

    /// True if some record was tested on a profile with a stress gradient,
    /// which is what makes A and k identifiable.
    pub fn has_gradient_data(&self) -> bool {
        self.levels.iter().any(|&(p, _)| self.profiles[p].has_gradient())
    }

    /// Scale of every record, in dataset order.
    pub fn record_etas(&self, theta: &Theta) -> Result<Vec<SpecimenEta>> {
        let per_level = self
            .levels
            .iter()
            .map(|&(p, eps)| specimen_eta(&self.profiles[p], eps, theta, &self.ctx))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.observations.iter().map(|o| per_level[o.level]).collect())
    }

    /// Negative log-likelihood, or an error naming the first bad record.
    pub fn try_neg_log_likelihood(&self, theta: &Theta) -> Result<f64> {
        let etas = self.record_etas(theta)?;
        let m = theta.m;
        let mut acc = CompensatedSum::new();
        for (i, (o, e)) in self.observations.iter().zip(&etas).enumerate() {
            let ln_eta = e.eta.ln();
            let ln_z = o.n_obs.ln() - ln_eta;
            let zm = (m * ln_z).exp();
            let term = if o.censored {
                zm
            } else {
                -m.ln() + ln_eta - (m - 1.0) * ln_z + zm
            };
            if !term.is_finite() {
                return Err(Error::numerical(format!(
                    "record {}: non-finite likelihood term (eta = {}, n_obs = {})",
                    i + 1,
                    e.eta,
                    o.n_obs
                )));
            }
            acc.add(term);
        }
        Ok(acc.total())
    }

    /// Negative log-likelihood with `+∞` for out-of-bounds or failing parameters.
    pub fn neg_log_likelihood(&self, theta: &Theta) -> f64 {
        if !theta.in_bounds() {
            return f64::INFINITY;
        }
        match self.try_neg_log_likelihood(theta) {
            Ok(v) => v,
            Err(e) => {
                log::debug!("likelihood penalty at {theta:?}: {e}");
                f64::INFINITY
            }
        }
    }

    /// Same design with new observed lives and censoring flags, in record order.
    pub fn with_observations(&self, obs: &[(f64, bool)]) -> Result<Self> {
        if obs.len() != self.observations.len() {
            return Err(Error::invalid("observation count does not match the dataset"));
        }
        let records = self
            .dataset
            .records()
            .iter()
            .zip(obs)
            .map(|(r, &(n_obs, censored))| super::TestRecord {
                n_obs,
                censored,
                ..r.clone()
            })
            .collect();
        let mut out = self.clone();
        out.dataset = FatigueDataset::new(records)?;
        for (o, &(n_obs, censored)) in out.observations.iter_mut().zip(obs) {
            o.n_obs = n_obs;
            o.censored = censored;
        }
        Ok(out)
    }
}

/// Negative log-likelihood of a dataset (convenience wrapper, `+∞` outside bounds).
pub fn neg_log_likelihood(
    theta: &Theta,
    dataset: &FatigueDataset,
    profiles: &[SpecimenProfile],
    ctx: FitContext,
) -> Result<f64> {
    Ok(LikelihoodModel::new(dataset, profiles, ctx)?.neg_log_likelihood(theta))
}
