//! Provenance manifest written next to every subcommand's outputs: the
//! resolved configuration and its hash, digests of all input files, and
//! format versions. Rendering is canonical (sorted keys, fixed layout), so
//! identical runs produce identical manifests.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::{io_data, CliError};

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub config: serde_json::Value,
    pub config_sha256: String,
    pub inputs: BTreeMap<String, String>,
    pub versions: BTreeMap<String, String>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

impl Manifest {
    pub fn new(command: &str, cfg: &ExperimentConfig) -> Self {
        let config = serde_json::to_value(cfg).expect("config serializes");
        let canonical = serde_json::to_string(&config).expect("value serializes");
        let mut versions = BTreeMap::new();
        versions.insert("cognid".to_string(), env!("CARGO_PKG_VERSION").to_string());
        versions.insert(
            "model_format".to_string(),
            cognid::classifier::MODEL_VERSION.to_string(),
        );
        Manifest {
            command: command.to_string(),
            config_sha256: sha256_hex(canonical.as_bytes()),
            config,
            inputs: BTreeMap::new(),
            versions,
        }
    }

    /// Records the SHA-256 of an input file under its path.
    pub fn add_input(&mut self, path: &Path) -> Result<(), CliError> {
        let bytes = std::fs::read(path).map_err(|e| io_data(path, e))?;
        self.inputs
            .insert(path.display().to_string(), sha256_hex(&bytes));
        Ok(())
    }

    pub fn render(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        text
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let path = dir.join("manifest.json");
        std::fs::write(&path, self.render()).map_err(|e| io_data(&path, e))
    }
}
