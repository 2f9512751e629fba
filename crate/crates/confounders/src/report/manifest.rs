//! Reproducibility record written alongside every run's outputs.

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::eval::AucSource;
use crate::features::FeatureConfigId;
use crate::forest::ForestParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub artifact_version: String,
    pub created_utc: String,
    pub dataset_path: String,
    pub dataset_sha256: String,
    pub model_id: String,
    pub provider_endpoint: Option<String>,
    pub forest_params: ForestParams,
    pub master_seed: u64,
    pub n_splits: usize,
    pub ratio: f64,
    pub stratified: bool,
    pub auc_source: AucSource,
    pub configs: Vec<FeatureConfigId>,
}

impl RunManifest {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }
}

/// Hex SHA-256 of a file's bytes.
pub fn sha256_file(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    let mut file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 8192];
    loop {
        let n = file.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    let digest = hasher.finalize();
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}
