use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::{CliError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize)]
pub struct OutputRecord {
    pub file: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: serde_json::Value,
    pub config_sha256: String,
    pub outputs: Vec<OutputRecord>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// SHA-256 of the configuration's compact JSON serialization.
pub fn config_hash<C: Serialize>(config: &C) -> Result<String> {
    Ok(sha256_hex(&serde_json::to_vec(config)?))
}

/// Writes `path` as the manifest of `outputs`, produced by `command` under `config`.
pub fn write_manifest<C: Serialize>(path: &Path, command: &str, config: &C, outputs: &[PathBuf]) -> Result<PathBuf> {
    let mut records = Vec::with_capacity(outputs.len());
    for out in outputs {
        let bytes = fs::read(out).map_err(CliError::file(out))?;
        records.push(OutputRecord {
            file: out.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
            bytes: bytes.len() as u64,
            sha256: sha256_hex(&bytes),
        });
    }
    let manifest = Manifest {
        tool: "ddpmc",
        version: VERSION,
        command: command.to_string(),
        config: serde_json::to_value(config)?,
        config_sha256: config_hash(config)?,
        outputs: records,
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(path, text).map_err(CliError::file(path))?;
    Ok(path.to_path_buf())
}
