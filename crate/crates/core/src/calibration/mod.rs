//! Maximum-likelihood calibration of the strain-life, notch-support and
//! Weibull parameters from specimen tests, with parametric bootstrap bands.
//!
//! A specimen's life is Weibull with shape `m` and a scale obtained from its
//! surface profile exactly as for a component surface. The parameter vector is
//! `θ = (σ'f, b, ε'f, c, A, k, m)`; E and the plasticity rule are taken from a
//! base material at the test temperature and held fixed.

mod bootstrap;
mod dataset;
mod fit;
mod information;
mod likelihood;
mod nelder_mead;
mod profile;
mod simulate;

pub use bootstrap::{
    bootstrap, log_grid, percentile, BootstrapOptions, BootstrapResult, ParameterBand, ProfileBands, SpaghettiCurve,
};
pub use dataset::{FatigueDataset, TestRecord, DATASET_CSV_HEADER};
pub use fit::{fit, FitOptions, FitResult, Parametrization, StartSummary};
pub use information::{median_log_std_error, observed_information};
pub use likelihood::{en_curve, neg_log_likelihood, specimen_eta, CurvePoint, LikelihoodModel, SpecimenEta};
pub use nelder_mead::{nelder_mead, NelderMeadOptions, NelderMeadResult};
pub use profile::{
    load_profiles, profiles_from_json_str, ProfileEntry, ProfileKind, ProfileRow, ProfileShape, SpecimenProfile,
};
pub use simulate::{simulate_dataset, DesignLevel};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field_ops::PlasticityRule;
use crate::strain_life::{CmbParams, Material, NotchSupport};

/// Calibrated parameter vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theta {
    pub sigma_f: f64,
    pub b: f64,
    pub eps_f: f64,
    pub c: f64,
    #[serde(rename = "A")]
    pub a: f64,
    pub k: f64,
    pub m: f64,
}

impl Theta {
    pub const NAMES: [&'static str; 7] = ["sigma_f", "b", "eps_f", "c", "A", "k", "m"];

    pub fn to_array(&self) -> [f64; 7] {
        [self.sigma_f, self.b, self.eps_f, self.c, self.a, self.k, self.m]
    }

    pub fn from_array(v: [f64; 7]) -> Self {
        let [sigma_f, b, eps_f, c, a, k, m] = v;
        Theta {
            sigma_f,
            b,
            eps_f,
            c,
            a,
            k,
            m,
        }
    }

    /// b, c < 0; σ'f, ε'f, A ≥ 0 with σ'f + ε'f > 0; 0 < k ≤ 2; m > 0; all finite.
    pub fn in_bounds(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
            && self.b < 0.0
            && self.c < 0.0
            && self.sigma_f >= 0.0
            && self.eps_f >= 0.0
            && self.sigma_f + self.eps_f > 0.0
            && self.a >= 0.0
            && self.k > 0.0
            && self.k <= 2.0
            && self.m > 0.0
    }

    pub fn cmb(&self, e_modulus: f64) -> CmbParams {
        CmbParams {
            sigma_f: self.sigma_f,
            b: self.b,
            eps_f: self.eps_f,
            c: self.c,
            e_modulus,
        }
    }

    pub fn notch(&self) -> NotchSupport {
        NotchSupport { a: self.a, k: self.k }
    }

    /// Parameters of `material` at temperature `t`.
    pub fn from_material(material: &Material, t: f64) -> Self {
        let p = material.at(t).cmb;
        Theta {
            sigma_f: p.sigma_f,
            b: p.b,
            eps_f: p.eps_f,
            c: p.c,
            a: material.notch.a,
            k: material.notch.k,
            m: material.m,
        }
    }

    /// Temperature-independent material carrying these parameters.
    pub fn to_material(&self, ctx: &FitContext) -> Result<Material> {
        Material::constant(self.cmb(ctx.e_modulus), self.notch(), self.m, ctx.plasticity)
    }
}

/// Quantities held fixed during calibration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitContext {
    pub e_modulus: f64,
    pub plasticity: PlasticityRule,
    pub n_cap: f64,
}

impl FitContext {
    pub fn from_material(material: &Material, t: f64, n_cap: f64) -> Result<Self> {
        if !(n_cap > 1.0) {
            return Err(Error::domain(format!("life cap must exceed one cycle, got {n_cap}")));
        }
        let local = material.at(t);
        Ok(FitContext {
            e_modulus: local.e_modulus,
            plasticity: local.plasticity,
            n_cap,
        })
    }

    pub fn elastic(e_modulus: f64) -> Self {
        FitContext {
            e_modulus,
            plasticity: PlasticityRule::Elastic,
            n_cap: crate::strain_life::DEFAULT_N_CAP,
        }
    }
}
