//! Command-line arguments.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::subset::Subset;

const SCHEMAS: &str = "\
Input files (units: mm, MPa, degrees C):

  mesh JSON
    {\"units\": {\"length\": \"mm\", \"stress\": \"MPa\", \"temperature\": \"C\"},
     \"nodes\": [[id, x, y, z], ...],
     \"elements\": [{\"type\": \"tet4\" | \"tet10\", \"conn\": [node ids]}, ...],
     \"fields\": {\"stress\": [[xx, yy, zz, xy, yz, zx], ...], \"temperature\": [T, ...]},
     \"surface\": [{\"elem\": index, \"face\": 0-3}, ...]}          (surface optional)
    Field arrays follow the order of `nodes`; stress is the elastic amplitude.

  material JSON
    {\"E\", \"sigma_f\", \"b\", \"eps_f\", \"c\": number or per-temperature list,
     \"temperatures\": [...] (needed when any list is given),
     \"A\", \"k\", \"m\": number,
     \"plasticity\": {\"rule\": \"elastic\" | \"neuber\", \"K_prime\", \"n_prime\"}}

  dataset CSV
    profile_id,eps_a,temp_C,n_obs,censored        (censored is 0 or 1)

  profiles JSON
    [{\"id\": \"smooth\", \"kind\": \"uniform\", \"area\": 30.0},
     {\"id\": \"notch\", \"kind\": \"tabulated\", \"rows\": [[dA, kappa, chi], ...]}]

Exit codes: 0 ok, 2 invalid input, 3 numerical failure, 4 fit did not converge.";

#[derive(Debug, Parser)]
#[command(name = "lcf-risk", version, about = "Probabilistic LCF crack-initiation life prediction", after_long_help = SCHEMAS)]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Component life distribution from an FEA result.
    Predict(PredictArgs),
    /// Maximum-likelihood fit of the material parameters to specimen tests.
    Calibrate(CalibrateArgs),
    /// Quantile E-N curves of specimen profiles.
    Encurve(EncurveArgs),
    /// Schema and consistency check of input files.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChiModeArg {
    Normal,
    Magnitude,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ParametrizationArg {
    Log,
    Raw,
}

#[derive(Debug, Args, Serialize)]
pub struct PredictArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    #[arg(long)]
    pub material: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub out_dir: PathBuf,
    /// Ignore the stress gradient (n_chi = 1 everywhere).
    #[arg(long, conflicts_with = "compare")]
    pub no_notch_support: bool,
    /// Run with and without notch support and report both.
    #[arg(long)]
    pub compare: bool,
    #[arg(long, value_enum, default_value_t = ChiModeArg::Normal)]
    pub chi_mode: ChiModeArg,
    /// Triangle rule degree (3 or 5).
    #[arg(long, default_value_t = 5)]
    pub quad_degree: u32,
    /// Life assigned where the strain is below the curve at this count.
    #[arg(long, default_value_t = 1e12)]
    pub n_cap: f64,
    /// Point selection such as "x<2&z>0.9"; may be repeated.
    #[arg(long = "subset")]
    #[serde(serialize_with = "display_all")]
    pub subsets: Vec<Subset>,
    /// Rows of the CDF table.
    #[arg(long, default_value_t = 200)]
    pub cdf_points: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct CalibrateArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub profiles: PathBuf,
    /// Start values, E and plasticity rule.
    #[arg(long)]
    pub material: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub out_dir: PathBuf,
    /// Bootstrap replicates (0 disables, otherwise at least 100).
    #[arg(long, default_value_t = 0)]
    pub bootstrap: usize,
    #[arg(long, default_value_t = 0.925)]
    pub ci_level: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 5)]
    pub starts: usize,
    #[arg(long, default_value_t = 3)]
    pub restarts: usize,
    /// Simplex iteration limit per start and restart.
    #[arg(long, default_value_t = 5000)]
    pub max_iterations: usize,
    #[arg(long, value_enum, default_value_t = ParametrizationArg::Log)]
    pub parametrization: ParametrizationArg,
    /// Parameter held at its start value (sigma_f, b, eps_f, c, A, k, m); may be repeated.
    #[arg(long = "fix")]
    pub fixed: Vec<String>,
    #[arg(long, default_value_t = 1e12)]
    pub n_cap: f64,
    /// Strain grid points of the band tables.
    #[arg(long, default_value_t = 25)]
    pub grid_points: usize,
    /// Replicate curves written to spaghetti.csv.
    #[arg(long, default_value_t = 200)]
    pub spaghetti: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct EncurveArgs {
    /// Fitted material file.
    #[arg(long)]
    pub material: PathBuf,
    #[arg(long)]
    pub profiles: PathBuf,
    /// Profile id; may be repeated (default: all).
    #[arg(long = "profile")]
    pub profile_ids: Vec<String>,
    /// Failure probability of a curve; may be repeated (default: 0.5).
    #[arg(long = "quantile")]
    pub quantiles: Vec<f64>,
    #[arg(long)]
    pub eps_min: f64,
    #[arg(long)]
    pub eps_max: f64,
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    /// Temperature at which a tabulated material is evaluated.
    #[arg(long)]
    pub temperature: Option<f64>,
    #[arg(long, default_value_t = 1e12)]
    pub n_cap: f64,
    /// Output CSV (default: stdout).
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ValidateArgs {
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    #[arg(long)]
    pub material: Option<PathBuf>,
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long)]
    pub profiles: Option<PathBuf>,
}

fn display_all<S: serde::Serializer>(v: &[Subset], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}
