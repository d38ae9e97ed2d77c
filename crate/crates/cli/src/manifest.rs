use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::output::to_json;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Everything that determines a run's output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub inputs: BTreeMap<String, InputDigest>,
    pub version: String,
    pub seed: u64,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value, seed: u64) -> Self {
        RunManifest {
            command: command.to_string(),
            config,
            inputs: BTreeMap::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
        }
    }

    /// Reads an input file and records its digest under `role`.
    pub fn read_input(&mut self, role: &str, path: &Path) -> Result<String, CliError> {
        let bytes = std::fs::read(path).map_err(|e| {
            CliError::Input(format!("cannot read {role} file {}: {e}", path.display()))
        })?;
        self.inputs.insert(
            role.to_string(),
            InputDigest {
                path: path.display().to_string(),
                sha256: hex::encode(Sha256::digest(&bytes)),
            },
        );
        String::from_utf8(bytes)
            .map_err(|_| CliError::Input(format!("{role} file {} is not UTF-8", path.display())))
    }

    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(to_json(self).as_bytes()))
    }
}
