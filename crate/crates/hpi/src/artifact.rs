//! Versioned JSON model artifacts and content-addressed run directories.

use std::fs;
use std::path::{Path, PathBuf};

use hpi_core::data::{CountryDataset, ModelSpec};
use hpi_core::models::{Learner, LearnerConfig, TrainedModel};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::io::write_atomic;

pub const FORMAT: &str = "hpi-model";
pub const VERSION: u32 = 1;

/// Everything that determines a run's outputs. Its hash names the run directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunKey {
    pub country: String,
    pub spec: ModelSpec,
    pub learner: String,
    pub seed: u64,
    pub runs: usize,
    pub min_rows: usize,
    pub config: LearnerConfig,
}

impl RunKey {
    /// Short hash of the key's JSON form.
    pub fn hash(&self) -> String {
        short_hash(&serde_json::to_vec(self).expect("run key serializes"))
    }

    pub fn dir_name(&self) -> String {
        format!("{}_{}_{}_{}", self.country, slug(&self.spec.name), self.learner, self.hash())
    }

    pub fn dir(&self, out: &Path) -> PathBuf {
        out.join(self.dir_name())
    }
}

/// First 12 hex digits of the SHA-256 of `bytes`.
pub fn short_hash(bytes: &[u8]) -> String {
    hex::encode(&Sha256::digest(bytes)[..6])
}

/// Lowercase alphanumerics of a name, e.g. `3-param` to `3param`.
pub fn slug(name: &str) -> String {
    name.chars()
        .filter(char::is_ascii_alphanumeric)
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

/// A trained model plus what is needed to reuse it: feature order and the latest
/// training row, which anchors scenario features that no axis covers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArtifact {
    pub format: String,
    pub version: u32,
    pub country: String,
    pub spec: ModelSpec,
    pub learner: Learner,
    pub seed: u64,
    pub runs: usize,
    pub config: LearnerConfig,
    pub feature_names: Vec<String>,
    pub last_quarter: String,
    pub last_row: Vec<f64>,
    pub last_target: f64,
    pub model: TrainedModel,
}

impl ModelArtifact {
    pub fn new(key: &RunKey, learner: Learner, data: &CountryDataset, model: TrainedModel) -> Self {
        let n = data.n();
        ModelArtifact {
            format: FORMAT.into(),
            version: VERSION,
            country: key.country.clone(),
            spec: key.spec.clone(),
            learner,
            seed: key.seed,
            runs: key.runs,
            config: key.config.clone(),
            feature_names: data.feature_names().to_vec(),
            last_quarter: data.quarters()[n - 1].to_string(),
            last_row: data.x().row(n - 1).to_vec(),
            last_target: data.y()[n - 1],
            model,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(self).map_err(|e| Error::Format {
            path: path.into(),
            message: e.to_string(),
        })?;
        bytes.push(b'\n');
        write_atomic(path, &bytes)
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingFile { path: path.into() });
        }
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let format_err = |message: String| Error::Format {
            path: path.into(),
            message,
        };
        let head: serde_json::Value = serde_json::from_str(&text).map_err(|e| format_err(e.to_string()))?;
        if head.get("format").and_then(|v| v.as_str()) != Some(FORMAT) {
            return Err(format_err(format!("not a {FORMAT} artifact")));
        }
        match head.get("version").and_then(|v| v.as_u64()) {
            Some(v) if v == u64::from(VERSION) => {}
            other => return Err(format_err(format!("unsupported artifact version {other:?}, expected {VERSION}"))),
        }
        serde_json::from_value(head).map_err(|e| format_err(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hpi_core::linalg::Matrix;
    use hpi_core::models::train;

    fn key() -> RunKey {
        RunKey {
            country: "CH".into(),
            spec: ModelSpec::builtin("3-param").unwrap(),
            learner: "knn".into(),
            seed: 1,
            runs: 3,
            min_rows: 40,
            config: LearnerConfig::default(),
        }
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = key();
        assert_eq!(a.hash(), key().hash());
        assert_eq!(a.hash().len(), 12);
        let mut b = key();
        b.seed = 2;
        assert_ne!(a.hash(), b.hash());
        assert!(a.dir_name().starts_with("CH_3param_knn_"));
    }

    #[test]
    fn round_trip_and_version_check() {
        let rows: Vec<Vec<f64>> = (0..50).map(|i| vec![i as f64, (i % 7) as f64]).collect();
        let y: Vec<f64> = (0..50).map(|i| i as f64 * 0.5).collect();
        let data = CountryDataset::synthetic(&["a", "b"], Matrix::from_rows(&rows).unwrap(), y).unwrap();
        let model = train(&data, Learner::Knn, &LearnerConfig::default(), 1).unwrap();
        let art = ModelArtifact::new(&key(), Learner::Knn, &data, model);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("model.json");
        art.save(&p).unwrap();
        assert_eq!(ModelArtifact::load(&p).unwrap(), art);

        let text = fs::read_to_string(&p).unwrap().replacen("\"version\": 1", "\"version\": 9", 1);
        fs::write(&p, text).unwrap();
        assert!(matches!(ModelArtifact::load(&p), Err(Error::Format { .. })));
    }
}
