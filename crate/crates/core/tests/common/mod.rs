#![allow(dead_code)]

use std::path::PathBuf;

use lcf_risk::calibration::{load_profiles, DesignLevel, FitContext, SpecimenProfile, Theta};
use lcf_risk::strain_life::Material;

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(rel)
}

pub struct CalibrationFixture {
    pub profiles: Vec<SpecimenProfile>,
    pub design: Vec<DesignLevel>,
    pub truth: Theta,
    pub start: Theta,
    pub ctx: FitContext,
}

pub fn calibration_fixture() -> CalibrationFixture {
    let truth = Material::load(fixture("calibration/truth.json")).unwrap();
    let start = Material::load(fixture("calibration/start.json")).unwrap();
    let design = std::fs::read_to_string(fixture("calibration/design.json")).unwrap();
    CalibrationFixture {
        profiles: load_profiles(fixture("calibration/profiles.json")).unwrap(),
        design: serde_json::from_str(&design).unwrap(),
        truth: Theta::from_material(&truth, 850.0),
        start: Theta::from_material(&start, 850.0),
        ctx: FitContext::from_material(&truth, 850.0, 1e12).unwrap(),
    }
}
