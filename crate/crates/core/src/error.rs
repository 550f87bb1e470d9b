use std::path::PathBuf;

/// Errors produced by the engine.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed input file. `context` carries the JSON path and line/column.
    #[error("parse error in {file}: {context}")]
    Parse { file: String, context: String },

    /// Input violates a structural invariant (mesh connectivity, table shapes, ...).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// Argument outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical step failed (singular Jacobian, non-finite summand, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// An iterative method did not converge.
    #[error("no convergence: {0}")]
    NonConvergence(String),

    /// No start of a likelihood fit converged; carries the best result found.
    #[error(
        "no convergence: none of {} fit starts converged (best negative log-likelihood {})",
        .0.starts.len(),
        .0.neg_log_likelihood
    )]
    FitNotConverged(Box<crate::calibration::FitResult>),
}

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Numerical,
    NonConvergence,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io { .. } | Error::Parse { .. } | Error::Invalid(_) | Error::Domain(_) => ErrorKind::Validation,
            Error::Numerical(_) => ErrorKind::Numerical,
            Error::NonConvergence(_) | Error::FitNotConverged(_) => ErrorKind::NonConvergence,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Deserializes JSON with the failing field path and line/column in the error.
pub(crate) fn from_json_str<T: serde::de::DeserializeOwned>(file: &str, text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::Parse {
            file: file.to_string(),
            context: format!(
                "at `{path}` (line {}, column {}): {inner}",
                inner.line(),
                inner.column()
            ),
        }
    })
}

pub(crate) fn read_to_string(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
