//! The JSON document every verdict-bearing run prints.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};
use tamc_core::presburger::{solver_version, SolverConfig};

use crate::CliError;

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolverInfo {
    pub binary: String,
    pub version: Option<String>,
    pub seed: u64,
    pub timeout_ms: u64,
}

impl SolverInfo {
    pub fn of(cfg: &SolverConfig) -> Self {
        SolverInfo {
            binary: cfg.path.display().to_string(),
            version: solver_version(cfg).ok(),
            seed: cfg.seed,
            timeout_ms: cfg.timeout_ms,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverInfo>,
    /// Command-specific fields, flattened into the report.
    #[serde(flatten)]
    pub details: Map<String, Value>,
    pub wall_ms: u64,
    /// SHA-256 of the report without `wall_ms` and `digest`.
    pub digest: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn digest_file(path: &Path) -> Result<InputDigest, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    Ok(InputDigest {
        path: path.display().to_string(),
        sha256: sha256_hex(&bytes),
    })
}

impl RunReport {
    pub fn new(command: &str, inputs: Vec<InputDigest>, verdict: &str) -> Self {
        RunReport {
            command: command.into(),
            inputs,
            verdict: verdict.into(),
            witness: None,
            solver: None,
            details: Map::new(),
            wall_ms: 0,
            digest: String::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.details
            .insert(key.into(), serde_json::to_value(value).expect("serializable"));
        self
    }

    /// Fills `digest` and `wall_ms` and renders the report.
    pub fn finish(mut self, wall_ms: u64) -> String {
        self.wall_ms = 0;
        self.digest = String::new();
        let mut v = serde_json::to_value(&self).expect("serializable");
        let obj = v.as_object_mut().expect("object");
        obj.remove("wall_ms");
        obj.remove("digest");
        self.digest = sha256_hex(serde_json::to_string(&v).expect("serializable").as_bytes());
        self.wall_ms = wall_ms;
        serde_json::to_string_pretty(&self).expect("serializable")
    }
}

pub fn write_text(path: &PathBuf, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}
