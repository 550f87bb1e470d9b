//! `validate`: parse inputs and check cross-references without computing lives.

use anyhow::Result;
use lcf_risk::calibration::{profiles_from_json_str, FatigueDataset, FitContext, LikelihoodModel};
use lcf_risk::mesh_io::MeshModel;
use lcf_risk::strain_life::{Material, DEFAULT_N_CAP};
use lcf_risk::Error;

use crate::args::ValidateArgs;
use crate::provenance::Input;

pub fn run(args: &ValidateArgs) -> Result<i32> {
    if args.mesh.is_none() && args.material.is_none() && args.dataset.is_none() && args.profiles.is_none() {
        return Err(Error::Invalid("nothing to validate; pass at least one input file".into()).into());
    }
    let material = match &args.material {
        Some(path) => {
            let input = Input::read("material", path)?;
            let m = Material::from_json_str(&input.name(), &input.text)?;
            let (lo, hi) = m.temperature_range();
            println!("material: ok ({}, T {lo} to {hi}, m = {})", input.name(), m.m);
            for w in m.warnings() {
                println!("material: warning: {w}");
            }
            Some(m)
        }
        None => None,
    };
    if let Some(path) = &args.mesh {
        let input = Input::read("mesh", path)?;
        let mesh = MeshModel::from_json_str(&input.name(), &input.text)?;
        let faces = mesh
            .explicit_surface()
            .map_or_else(|| mesh.extract_surface().len(), <[_]>::len);
        println!(
            "mesh: ok ({}, {} nodes, {} elements, {} surface faces)",
            input.name(),
            mesh.node_count(),
            mesh.element_count(),
            faces
        );
        if let Some(m) = &material {
            let outside = mesh
                .nodal_temperature()
                .iter()
                .filter(|&&t| m.is_extrapolated(t))
                .count();
            if outside > 0 {
                println!("mesh: warning: {outside} nodes lie outside the material temperature table");
            }
        }
    }
    let profiles = match &args.profiles {
        Some(path) => {
            let input = Input::read("profiles", path)?;
            let p = profiles_from_json_str(&input.name(), &input.text)?;
            println!("profiles: ok ({}, {} profiles)", input.name(), p.len());
            Some(p)
        }
        None => None,
    };
    if let Some(path) = &args.dataset {
        let input = Input::read("dataset", path)?;
        let d = FatigueDataset::from_csv_str(&input.name(), &input.text)?;
        println!(
            "dataset: ok ({}, {} records, {} failures, T = {})",
            input.name(),
            d.len(),
            d.failures(),
            d.temperature()
        );
        if let Some(p) = &profiles {
            let ctx = match &material {
                Some(m) => FitContext::from_material(m, d.temperature(), DEFAULT_N_CAP)?,
                None => FitContext::elastic(1.0),
            };
            LikelihoodModel::new(&d, p, ctx)?;
            println!("dataset: all profile references resolved");
        }
    }
    Ok(0)
}
