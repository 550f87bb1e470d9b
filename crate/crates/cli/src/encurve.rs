//! `encurve`: life quantile curves of specimen profiles.

use std::fmt::Write as _;

use anyhow::Result;
use lcf_risk::calibration::{en_curve, log_grid, profiles_from_json_str, FitContext, Theta};
use lcf_risk::strain_life::Material;
use lcf_risk::Error;

use crate::args::EncurveArgs;
use crate::provenance::{write_text, Input, Provenance};

pub fn run(args: &EncurveArgs) -> Result<i32> {
    let material_in = Input::read("material", &args.material)?;
    let profiles_in = Input::read("profiles", &args.profiles)?;
    let provenance = Provenance::new("encurve", args, &[&material_in, &profiles_in], None)?;
    if !(args.eps_min > 0.0 && args.eps_max >= args.eps_min) || args.points == 0 {
        return Err(Error::Domain(format!(
            "need 0 < --eps-min <= --eps-max and --points > 0 (got {}, {}, {})",
            args.eps_min, args.eps_max, args.points
        ))
        .into());
    }
    let material = Material::from_json_str(&material_in.name(), &material_in.text)?;
    let (t_lo, t_hi) = material.temperature_range();
    let temperature = match args.temperature {
        Some(t) => t,
        None if t_lo == t_hi => t_lo,
        None => return Err(Error::Invalid("tabulated material needs --temperature".into()).into()),
    };
    let profiles = profiles_from_json_str(&profiles_in.name(), &profiles_in.text)?;
    let selected: Vec<_> = if args.profile_ids.is_empty() {
        profiles.iter().collect()
    } else {
        args.profile_ids
            .iter()
            .map(|id| {
                profiles
                    .iter()
                    .find(|p| &p.id == id)
                    .ok_or_else(|| Error::Invalid(format!("profile {id} is not defined in {}", profiles_in.name())))
            })
            .collect::<Result<_, _>>()?
    };
    let quantiles = if args.quantiles.is_empty() {
        vec![0.5]
    } else {
        args.quantiles.clone()
    };
    let theta = Theta::from_material(&material, temperature);
    let ctx = FitContext::from_material(&material, temperature, args.n_cap)?;
    let grid = log_grid(args.eps_min, args.eps_max, args.points);

    let mut out = format!("{}\nprofile,eps_a,p,cycles\n", provenance.csv_comment());
    for profile in selected {
        for &p in &quantiles {
            for point in en_curve(&theta, profile, p, &grid, &ctx)? {
                writeln!(out, "{},{},{p},{}", profile.id, point.eps_a, point.cycles)?;
            }
        }
    }
    match &args.out {
        Some(path) => write_text(path, &out)?,
        None => print!("{out}"),
    }
    Ok(0)
}
