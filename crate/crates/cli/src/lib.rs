//! Command-line front end of the `lcf_risk` engine.

pub mod args;
pub mod calibrate;
pub mod encurve;
pub mod predict;
pub mod provenance;
pub mod subset;
pub mod validate;

use args::{Cli, Command};
use lcf_risk::ErrorKind;

pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> anyhow::Result<i32> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match &cli.command {
        Command::Predict(a) => predict::run(a),
        Command::Calibrate(a) => calibrate::run(a),
        Command::Encurve(a) => encurve::run(a),
        Command::Validate(a) => validate::run(a),
    }
}

/// Exit code for an error: the engine's classification when available.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    let kind = err
        .chain()
        .find_map(|e| e.downcast_ref::<lcf_risk::Error>())
        .map(|e| e.kind());
    match kind {
        Some(ErrorKind::Numerical) => EXIT_NUMERICAL,
        Some(ErrorKind::NonConvergence) => calibrate::EXIT_NOT_CONVERGED,
        Some(ErrorKind::Validation) | None => EXIT_VALIDATION,
    }
}
