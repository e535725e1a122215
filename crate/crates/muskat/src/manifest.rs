//! Run manifests: the config echo, how the run ended and the snapshot index.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::RawConfig;
use crate::snapshot::{read_snapshot, DiagnosticsHeader, SnapshotData, SnapshotError};

pub const MANIFEST_FORMAT: &str = "muskat-manifest";
pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotEntry {
    /// File name relative to the manifest's directory.
    pub file: String,
    pub t: f64,
    pub accepted_steps: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub initial: Option<DiagnosticsHeader>,
    #[serde(rename = "final")]
    pub last: Option<DiagnosticsHeader>,
    pub min_rt_infimum: Option<f64>,
    pub max_sobolev: Option<f64>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub format: String,
    pub library_version: String,
    pub config: RawConfig,
    /// `completed`, `rt_breakdown`, `dt_underflow` or `non_finite`.
    pub termination: String,
    pub error: Option<String>,
    pub final_time: f64,
    pub wall_time_seconds: f64,
    pub snapshots: Vec<SnapshotEntry>,
    pub summary: Summary,
}

#[derive(Debug, thiserror::Error)]
pub enum ManifestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> Result<PathBuf, ManifestError> {
        let path = dir.join(MANIFEST_NAME);
        let text = serde_json::to_string_pretty(self).expect("manifests serialize");
        fs::write(&path, text + "\n").map_err(|source| ManifestError::Io {
            path: path.clone(),
            source,
        })?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self, ManifestError> {
        let text = fs::read_to_string(path).map_err(|source| ManifestError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let m: RunManifest = serde_json::from_str(&text).map_err(|e| ManifestError::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        if m.format != MANIFEST_FORMAT {
            return Err(ManifestError::Format {
                path: path.to_path_buf(),
                message: format!("unexpected format `{}`", m.format),
            });
        }
        Ok(m)
    }

    /// Reads every listed snapshot; fails on the first one that is missing or malformed.
    pub fn load_snapshots(&self, dir: &Path) -> Result<Vec<SnapshotData>, ManifestError> {
        self.snapshots
            .iter()
            .map(|e| Ok(read_snapshot(&dir.join(&e.file))?))
            .collect()
    }
}
