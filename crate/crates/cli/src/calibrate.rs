//! `calibrate`: likelihood fit and optional parametric bootstrap.

use std::fmt::Write as _;

use anyhow::Result;
use lcf_risk::calibration::{
    bootstrap, fit, log_grid, profiles_from_json_str, BootstrapOptions, FatigueDataset, FitContext, FitOptions,
    FitResult, LikelihoodModel, NelderMeadOptions, ParameterBand, Parametrization, Theta,
};
use lcf_risk::strain_life::Material;
use lcf_risk::Error;
use serde::Serialize;

use crate::args::{CalibrateArgs, ParametrizationArg};
use crate::provenance::{write_json, write_text, Input, Provenance};

#[derive(Debug, Serialize)]
pub struct BootstrapSummary {
    pub replicates: usize,
    pub failures: usize,
    pub ci_level: f64,
    pub seed: u64,
    pub parameters: Vec<ParameterBand>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct FitReport {
    pub provenance: Provenance,
    pub temperature: f64,
    pub e_modulus: f64,
    pub records: usize,
    pub failures: usize,
    pub fit: FitResult,
    pub bootstrap: Option<BootstrapSummary>,
}

pub const EXIT_NOT_CONVERGED: i32 = 4;

pub fn run(args: &CalibrateArgs) -> Result<i32> {
    let dataset_in = Input::read("dataset", &args.dataset)?;
    let profiles_in = Input::read("profiles", &args.profiles)?;
    let material_in = Input::read("material", &args.material)?;
    let provenance = Provenance::new(
        "calibrate",
        args,
        &[&dataset_in, &profiles_in, &material_in],
        Some(args.seed),
    )?;

    if args.bootstrap > 0 && args.bootstrap < 100 {
        return Err(Error::Invalid(format!(
            "--bootstrap needs at least 100 replicates, got {}",
            args.bootstrap
        ))
        .into());
    }
    if !(0.0..1.0).contains(&args.ci_level) {
        return Err(Error::Domain(format!("--ci-level must lie in [0, 1), got {}", args.ci_level)).into());
    }
    if args.starts == 0 || args.grid_points < 2 {
        return Err(Error::Invalid("--starts must be positive and --grid-points at least 2".into()).into());
    }
    let mut fixed = [false; 7];
    for name in &args.fixed {
        let i = Theta::NAMES.iter().position(|n| n == name).ok_or_else(|| {
            Error::Invalid(format!(
                "--fix {name}: unknown parameter (use {})",
                Theta::NAMES.join(", ")
            ))
        })?;
        fixed[i] = true;
    }

    let dataset = FatigueDataset::from_csv_str(&dataset_in.name(), &dataset_in.text)?;
    let profiles = profiles_from_json_str(&profiles_in.name(), &profiles_in.text)?;
    let material = Material::from_json_str(&material_in.name(), &material_in.text)?;
    let temperature = dataset.temperature();
    let ctx = FitContext::from_material(&material, temperature, args.n_cap)?;
    let model = LikelihoodModel::new(&dataset, &profiles, ctx)?;
    let theta0 = Theta::from_material(&material, temperature);

    let opts = FitOptions {
        starts: args.starts,
        seed: args.seed,
        restarts: args.restarts,
        fixed,
        parametrization: match args.parametrization {
            ParametrizationArg::Log => Parametrization::Log,
            ParametrizationArg::Raw => Parametrization::Raw,
        },
        nelder_mead: NelderMeadOptions {
            max_iter: args.max_iterations,
            ..NelderMeadOptions::default()
        },
        ..FitOptions::default()
    };
    let (fitted, converged) = match fit(&model, &theta0, &opts) {
        Ok(r) => (r, true),
        Err(Error::FitNotConverged(best)) => (*best, false),
        Err(e) => return Err(e.into()),
    };
    for w in &fitted.warnings {
        log::warn!("{w}");
    }
    log::info!(
        "fit converged: {converged}, negative log-likelihood {}",
        fitted.neg_log_likelihood
    );

    std::fs::create_dir_all(&args.out_dir)?;
    let mut summary = None;
    if converged && args.bootstrap > 0 {
        let (lo, hi) = dataset.strain_range();
        let boot = bootstrap(
            &model,
            &fitted,
            &BootstrapOptions {
                replicates: args.bootstrap,
                ci_level: args.ci_level,
                seed: args.seed,
                grid: log_grid(lo, hi, args.grid_points),
                spaghetti: args.spaghetti,
                ..BootstrapOptions::default()
            },
        )?;
        for w in &boot.warnings {
            log::warn!("{w}");
        }
        let header = provenance.csv_comment();
        for p in &boot.profiles {
            let mut out = format!("{header}\neps_a,estimate,median,lower,upper\n");
            for (i, eps) in boot.grid.iter().enumerate() {
                writeln!(
                    out,
                    "{eps},{},{},{},{}",
                    p.estimate[i], p.median[i], p.lower[i], p.upper[i]
                )?;
            }
            write_text(&args.out_dir.join(format!("bands_{}.csv", p.id)), &out)?;
        }
        let mut out = format!("{header}\nreplicate,profile,eps_a,cycles\n");
        for c in &boot.spaghetti {
            for (eps, n) in boot.grid.iter().zip(&c.cycles) {
                writeln!(out, "{},{},{eps},{n}", c.replicate, c.profile)?;
            }
        }
        write_text(&args.out_dir.join("spaghetti.csv"), &out)?;
        summary = Some(BootstrapSummary {
            replicates: boot.replicates,
            failures: boot.failures,
            ci_level: boot.ci_level,
            seed: boot.seed,
            parameters: boot.parameters,
            warnings: boot.warnings,
        });
    }

    let mut material_file = fitted.theta.to_material(&ctx)?.to_file();
    material_file.provenance = Some(serde_json::to_value(&provenance)?);
    write_json(&args.out_dir.join("fitted_material.json"), &material_file)?;
    let report = FitReport {
        provenance,
        temperature,
        e_modulus: ctx.e_modulus,
        records: dataset.len(),
        failures: dataset.failures(),
        fit: fitted,
        bootstrap: summary,
    };
    write_json(&args.out_dir.join("fit.json"), &report)?;
    if converged {
        Ok(0)
    } else {
        log::error!("no fit start converged; best result written with converged = false");
        Ok(EXIT_NOT_CONVERGED)
    }
}
