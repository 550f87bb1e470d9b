//! `predict`: surface fields, deterministic lives and the component life distribution.

use std::fmt::Write as _;

use anyhow::Result;
use lcf_risk::field_ops::{surface_fields, ChiMode, GradientOptions, SurfaceFields};
use lcf_risk::mesh_io::{build_quadrature, MeshModel, QuadratureRule, SurfaceQuadrature};
use lcf_risk::reliability::{
    size_effect_factor, specimen_reference, subset_distribution, write_hazard_csv, DistributionReport, LifeField,
    LifeOptions, WeibullLife,
};
use lcf_risk::strain_life::Material;
use serde::Serialize;

use crate::args::{ChiModeArg, PredictArgs};
use crate::provenance::{write_json, write_text, Input, Provenance};
use crate::subset::Subset;

#[derive(Debug, Serialize)]
pub struct MeshSummary {
    pub nodes: usize,
    pub elements: usize,
    pub surface_faces: usize,
    pub integration_points: usize,
    pub surface_area: f64,
}

#[derive(Debug, Serialize)]
pub struct FieldSummary {
    pub max_sigma_e: f64,
    pub max_eps_a: f64,
    pub max_chi: f64,
    pub chi_floored: usize,
    pub chi_t_floored: usize,
    pub extrapolated_points: usize,
}

#[derive(Debug, Serialize)]
pub struct SubsetReport {
    pub expr: String,
    pub points: usize,
    pub area: f64,
    pub eta: f64,
    pub median: f64,
    /// Share of the component's cumulative hazard.
    pub hazard_fraction: f64,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub label: &'static str,
    pub notch_support: bool,
    pub distribution: DistributionReport,
    pub specimen_reference_cycles: Option<f64>,
    pub subsets: Vec<SubsetReport>,
}

#[derive(Debug, Serialize)]
pub struct SubsetComparison {
    pub expr: String,
    pub median_ratio: f64,
    /// Full-component median without notch support.
    pub reference_cycles: f64,
    pub pof_plain: f64,
    pub pof_notch: f64,
    pub pof_decrease: f64,
}

#[derive(Debug, Serialize)]
pub struct Comparison {
    /// Median with notch support over median without.
    pub median_ratio: f64,
    pub subsets: Vec<SubsetComparison>,
}

#[derive(Debug, Serialize)]
pub struct PredictReport {
    pub provenance: Provenance,
    pub mesh: MeshSummary,
    pub fields: FieldSummary,
    pub runs: Vec<RunReport>,
    pub comparison: Option<Comparison>,
    pub warnings: Vec<String>,
}

struct Run {
    label: &'static str,
    life: LifeField,
    dist: WeibullLife,
    subsets: Vec<WeibullLife>,
}

pub fn run(args: &PredictArgs) -> Result<i32> {
    let mesh_in = Input::read("mesh", &args.mesh)?;
    let material_in = Input::read("material", &args.material)?;
    let provenance = Provenance::new("predict", args, &[&mesh_in, &material_in], None)?;
    if !(args.n_cap > 1.0) {
        return Err(lcf_risk::Error::Domain(format!("--n-cap must exceed 1, got {}", args.n_cap)).into());
    }
    if args.cdf_points < 2 {
        return Err(lcf_risk::Error::Invalid("--cdf-points must be at least 2".into()).into());
    }
    let rule = QuadratureRule::from_degree(args.quad_degree)?;
    let mesh = MeshModel::from_json_str(&mesh_in.name(), &mesh_in.text)?;
    let material = Material::from_json_str(&material_in.name(), &material_in.text)?;
    let mut warnings: Vec<String> = material.warnings().to_vec();

    let faces = match mesh.explicit_surface() {
        Some(f) => f.to_vec(),
        None => mesh.extract_surface(),
    };
    let quad = build_quadrature(&mesh, &faces, rule)?;
    log::info!("{} surface faces, {} integration points", faces.len(), quad.len());
    let opts = GradientOptions {
        mode: match args.chi_mode {
            ChiModeArg::Normal => ChiMode::Normal,
            ChiModeArg::Magnitude => ChiMode::Magnitude,
        },
        ..GradientOptions::default()
    };
    let fields = surface_fields(&mesh, &quad, &material, &opts)?;
    let field_summary = summarize_fields(&fields, &material);
    if field_summary.extrapolated_points > 0 {
        warnings.push(format!(
            "{} integration points lie outside the material temperature table; parameters were clamped",
            field_summary.extrapolated_points
        ));
    }

    let modes: Vec<(&'static str, bool)> = if args.compare {
        vec![("notch_support", true), ("plain", false)]
    } else if args.no_notch_support {
        vec![("plain", false)]
    } else {
        vec![("notch_support", true)]
    };
    let mut runs = Vec::new();
    for (label, notch_support) in modes {
        let life = LifeField::compute(
            &quad,
            &fields,
            &material,
            &LifeOptions {
                notch_support,
                n_cap: args.n_cap,
            },
        )?;
        if life.capped_count() > 0 {
            warnings.push(format!(
                "{label}: {} integration points reached the life cap",
                life.capped_count()
            ));
        }
        let dist = WeibullLife::from_field(&life, material.m)?;
        let mut subsets = Vec::new();
        for s in &args.subsets {
            let selected = life.select(|p| s.contains(p));
            if selected.is_empty() {
                return Err(lcf_risk::Error::Domain(format!("subset `{s}` selects no integration points")).into());
            }
            let mut d = subset_distribution(&life, &selected, material.m)?;
            d.subset = Some(s.to_string());
            subsets.push(d);
        }
        runs.push(Run {
            label,
            life,
            dist,
            subsets,
        });
    }

    let mut run_reports = Vec::new();
    for r in &runs {
        let reference = specimen_reference(&r.life, &material, args.n_cap)
            .ok()
            .filter(|s| !s.is_capped());
        let size = match reference {
            Some(s) => Some(size_effect_factor(&r.dist, &s)?),
            None => {
                warnings.push(format!(
                    "{}: no smooth-specimen reference life; size-effect factor omitted",
                    r.label
                ));
                None
            }
        };
        let subsets = args
            .subsets
            .iter()
            .zip(&r.subsets)
            .map(|(s, d)| subset_report(s, d, &r.life, &r.dist))
            .collect();
        run_reports.push(RunReport {
            label: r.label,
            notch_support: r.life.notch_support,
            distribution: DistributionReport::new(&r.dist, &r.life, size)?,
            specimen_reference_cycles: reference.map(|s| s.cycles),
            subsets,
        });
    }
    let comparison = (runs.len() == 2).then(|| compare(&runs[0], &runs[1], &args.subsets));

    let report = PredictReport {
        provenance: provenance.clone(),
        mesh: MeshSummary {
            nodes: mesh.node_count(),
            elements: mesh.element_count(),
            surface_faces: faces.len(),
            integration_points: quad.len(),
            surface_area: quad.total_weight(),
        },
        fields: field_summary,
        runs: run_reports,
        comparison,
        warnings,
    };
    for w in &report.warnings {
        log::warn!("{w}");
    }

    std::fs::create_dir_all(&args.out_dir)?;
    write_json(&args.out_dir.join("report.json"), &report)?;
    for r in &runs {
        let mut buf = format!("{}\n", provenance.csv_comment()).into_bytes();
        write_hazard_csv(&mut buf, &r.life, material.m)?;
        write_text(
            &args.out_dir.join(format!("hazard_{}.csv", r.label)),
            &String::from_utf8(buf)?,
        )?;
    }
    write_text(
        &args.out_dir.join("cdf.csv"),
        &cdf_table(&provenance, &runs, args.cdf_points)?,
    )?;
    write_text(
        &args.out_dir.join("surface_fields.csv"),
        &fields_table(&provenance, &quad, &fields),
    )?;
    Ok(0)
}

fn summarize_fields(fields: &SurfaceFields, material: &Material) -> FieldSummary {
    let max = |f: fn(&lcf_risk::field_ops::SurfacePointState) -> f64| fields.points.iter().map(f).fold(0.0, f64::max);
    FieldSummary {
        max_sigma_e: max(|p| p.sigma_e),
        max_eps_a: max(|p| p.eps_a),
        max_chi: max(|p| p.chi),
        chi_floored: fields.chi_floored,
        chi_t_floored: fields.chi_t_floored,
        extrapolated_points: fields
            .points
            .iter()
            .filter(|p| material.is_extrapolated(p.temperature))
            .count(),
    }
}

fn subset_report(s: &Subset, d: &WeibullLife, life: &LifeField, total: &WeibullLife) -> SubsetReport {
    let selected = life.select(|p| s.contains(p));
    SubsetReport {
        expr: s.to_string(),
        points: selected.len(),
        area: selected.iter().map(|&i| life.points[i].weight).sum(),
        eta: d.eta,
        median: d.median(),
        hazard_fraction: (total.eta / d.eta).powf(d.m),
    }
}

fn compare(notch: &Run, plain: &Run, subsets: &[Subset]) -> Comparison {
    let reference = plain.dist.median();
    Comparison {
        median_ratio: notch.dist.median() / plain.dist.median(),
        subsets: subsets
            .iter()
            .zip(notch.subsets.iter().zip(&plain.subsets))
            .map(|(s, (n, p))| {
                let (pof_plain, pof_notch) = (p.cdf(reference), n.cdf(reference));
                SubsetComparison {
                    expr: s.to_string(),
                    median_ratio: n.median() / p.median(),
                    reference_cycles: reference,
                    pof_plain,
                    pof_notch,
                    pof_decrease: pof_plain - pof_notch,
                }
            })
            .collect(),
    }
}

fn cdf_table(provenance: &Provenance, runs: &[Run], points: usize) -> Result<String> {
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for r in runs {
        lo = lo.min(r.dist.quantile(1e-4)?);
        hi = hi.max(r.dist.quantile(1.0 - 1e-4)?);
    }
    let mut out = format!("{}\nN", provenance.csv_comment());
    for r in runs {
        write!(out, ",F_{}", r.label)?;
    }
    out.push('\n');
    for n in lcf_risk::calibration::log_grid(lo, hi, points) {
        write!(out, "{n}")?;
        for r in runs {
            write!(out, ",{}", r.dist.cdf(n))?;
        }
        out.push('\n');
    }
    Ok(out)
}

fn fields_table(provenance: &Provenance, quad: &SurfaceQuadrature, fields: &SurfaceFields) -> String {
    let mut out = format!(
        "{}\nx,y,z,elem,face,q,weight,T,sigma_e,eps_a,chi,chi_T\n",
        provenance.csv_comment()
    );
    for (q, s) in quad.points.iter().zip(&fields.points) {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            q.position[0],
            q.position[1],
            q.position[2],
            q.elem,
            q.face,
            q.q,
            q.weight,
            s.temperature,
            s.sigma_e,
            s.eps_a,
            s.chi,
            s.chi_t
        );
    }
    out
}
