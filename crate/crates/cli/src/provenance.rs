//! Input hashing and the provenance block embedded in every output file.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct InputHash {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

/// An input file read once, so the hash covers exactly the bytes parsed.
pub struct Input {
    pub path: PathBuf,
    pub text: String,
    pub hash: InputHash,
}

impl Input {
    pub fn read(role: &str, path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|source| lcf_risk::Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let sha256 = format!("{:x}", Sha256::digest(&bytes));
        let text = String::from_utf8(bytes)
            .map_err(|_| lcf_risk::Error::Invalid(format!("{} is not valid UTF-8", path.display())))?;
        Ok(Input {
            path: path.to_path_buf(),
            text,
            hash: InputHash {
                role: role.to_string(),
                path: path.display().to_string(),
                sha256,
            },
        })
    }

    pub fn name(&self) -> String {
        self.path.display().to_string()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: serde_json::Value,
    pub inputs: Vec<InputHash>,
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn new(command: &'static str, config: &impl Serialize, inputs: &[&Input], seed: Option<u64>) -> Result<Self> {
        Ok(Provenance {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            config: serde_json::to_value(config)?,
            inputs: inputs.iter().map(|i| i.hash.clone()).collect(),
            seed,
        })
    }

    /// Single comment line for CSV headers.
    pub fn csv_comment(&self) -> String {
        format!("# {}", serde_json::to_string(self).expect("provenance serializes"))
    }
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}
