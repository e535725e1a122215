//! Running a configuration and writing its snapshots and manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use muskat_core::evolution::{simulate, Termination, Trajectory};
use muskat_core::Error;

use crate::config::{ConfigError, RunConfig};
use crate::manifest::{ManifestError, RunManifest, SnapshotEntry, Summary, MANIFEST_FORMAT};
use crate::snapshot::{snapshot_name, write_snapshot, SnapshotError};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error("simulation failed: {0}")]
    Core(Error),
}

pub struct RunOutcome {
    pub manifest: RunManifest,
    pub manifest_path: PathBuf,
    pub trajectory: Option<Trajectory>,
}

impl RunOutcome {
    /// 0 when the run reached `t_end`, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.manifest.termination == Termination::Completed.as_str() {
            0
        } else {
            1
        }
    }
}

fn summarize(tr: &Trajectory) -> Summary {
    let first = &tr.snapshots[0];
    let last = tr.last();
    let infima = tr.snapshots.iter().filter_map(|s| s.diagnostics.rt_infimum);
    Summary {
        initial: Some((&first.diagnostics).into()),
        last: Some((&last.diagnostics).into()),
        min_rt_infimum: infima.reduce(f64::min),
        max_sobolev: tr.snapshots.iter().map(|s| s.diagnostics.sobolev).reduce(f64::max),
        accepted_steps: last.accepted_steps,
        rejected_steps: last.rejected_steps,
    }
}

/// Runs `cfg`, writing snapshots and `manifest.json` into `cfg.output_dir`.
///
/// Initial data outside the Rayleigh-Taylor set (with the gate on) is not an
/// error here: the manifest records `rt_breakdown` and lists no snapshots.
pub fn run_config(cfg: &RunConfig) -> Result<RunOutcome, RunError> {
    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir).map_err(|source| ManifestError::Io {
        path: dir.clone(),
        source,
    })?;
    let start = Instant::now();
    let result = simulate(&cfg.f0, &cfg.params, cfg.t_end, &cfg.controls, cfg.snapshot_every);
    let mut manifest = RunManifest {
        format: MANIFEST_FORMAT.into(),
        library_version: env!("CARGO_PKG_VERSION").into(),
        config: cfg.raw.clone(),
        termination: String::new(),
        error: None,
        final_time: 0.0,
        wall_time_seconds: 0.0,
        snapshots: Vec::new(),
        summary: Summary::default(),
    };
    let trajectory = match result {
        Ok(tr) => {
            for (i, s) in tr.snapshots.iter().enumerate() {
                let name = snapshot_name(i);
                write_snapshot(s, dir, &name)?;
                manifest.snapshots.push(SnapshotEntry {
                    file: name,
                    t: s.t,
                    accepted_steps: s.accepted_steps,
                });
            }
            manifest.termination = tr.termination.as_str().into();
            manifest.error = tr.error.as_ref().map(|e| e.to_string());
            manifest.final_time = tr.final_time;
            manifest.summary = summarize(&tr);
            Some(tr)
        }
        Err(e @ Error::RtBreakdown { .. }) => {
            manifest.termination = Termination::RtBreakdown.as_str().into();
            manifest.error = Some(e.to_string());
            None
        }
        Err(e) => return Err(RunError::Core(e)),
    };
    manifest.wall_time_seconds = start.elapsed().as_secs_f64();
    let manifest_path = manifest.write(dir)?;
    Ok(RunOutcome {
        manifest,
        manifest_path,
        trajectory,
    })
}

/// Re-runs the configuration echoed in a manifest. With `output_dir` set the
/// new run is written there instead of the original directory.
pub fn rerun(manifest_path: &Path, output_dir: Option<&Path>) -> Result<RunOutcome, RunError> {
    let manifest = RunManifest::read(manifest_path)?;
    let mut raw = manifest.config;
    if let Some(dir) = output_dir {
        raw.output_dir = dir.to_path_buf();
    }
    run_config(&raw.validate()?)
}
