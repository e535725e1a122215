//! Configuration files, snapshot and manifest formats, verification suites
//! and the command line for `muskat-core`.

pub mod cli;
pub mod config;
pub mod manifest;
pub mod run;
pub mod snapshot;
pub mod verify;

pub use config::{parse_config, ConfigError, RunConfig};
pub use manifest::RunManifest;
pub use run::{rerun, run_config, RunOutcome};
pub use snapshot::{read_snapshot, write_snapshot, SnapshotData};
