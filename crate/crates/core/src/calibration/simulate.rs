//! Synthetic specimen data drawn from a known parameter set.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{specimen_eta, FatigueDataset, FitContext, SpecimenProfile, TestRecord, Theta};
use crate::error::{Error, Result};

/// `count` specimens of one profile at one nominal strain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignLevel {
    pub profile_id: String,
    pub eps_a: f64,
    pub count: usize,
    /// Tests stop here; longer lives are recorded as censored at this count.
    #[serde(default)]
    pub runout: Option<f64>,
}

/// Inverse-CDF Weibull draw.
pub(crate) fn weibull_draw(rng: &mut impl Rng, eta: f64, m: f64) -> f64 {
    let u: f64 = rng.random();
    eta * (-(-u).ln_1p()).powf(1.0 / m)
}

/// Dataset with lives drawn from `Weibull(m, η(profile, ε))` under `theta`.
pub fn simulate_dataset(
    profiles: &[SpecimenProfile],
    design: &[DesignLevel],
    theta: &Theta,
    ctx: &FitContext,
    temperature: f64,
    seed: u64,
) -> Result<FatigueDataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::new();
    for level in design {
        let profile = profiles
            .iter()
            .find(|p| p.id == level.profile_id)
            .ok_or_else(|| Error::invalid(format!("design references unknown profile {}", level.profile_id)))?;
        let eta = specimen_eta(profile, level.eps_a, theta, ctx)?.eta;
        for _ in 0..level.count {
            let n = weibull_draw(&mut rng, eta, theta.m).max(f64::MIN_POSITIVE);
            let (n_obs, censored) = match level.runout {
                Some(r) if n > r => (r, true),
                _ => (n, false),
            };
            records.push(TestRecord {
                profile_id: level.profile_id.clone(),
                eps_a: level.eps_a,
                temperature,
                n_obs,
                censored,
            });
        }
    }
    FatigueDataset::new(records)
}
