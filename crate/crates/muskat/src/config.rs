//! Run configuration files (TOML).
//!
//! ```toml
//! t_end = 1.0
//! snapshot_every = 10        # optional, default 10
//! output_dir = "out"         # optional, default "output", relative to the file
//!
//! [normalized]               # or a [params] table with the physical constants
//! atwood = 0.5
//! theta = 1.0
//! sigma = 0.0
//!
//! [grid]
//! half_length = 10.0
//! n = 256
//!
//! [initial_condition]
//! kind = "gaussian"          # flat | gaussian | wave_packet | rough | file
//! amplitude = 0.1
//! width = 1.0
//!
//! [controls]                 # optional, every key has a default
//! stepper = "rk_adaptive"    # or "imex"
//! rel_tol = 1e-8
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use muskat_core::evolution::{StepControls, Stepper};
use muskat_core::grid::DEFAULT_DECAY_THRESHOLD;
use muskat_core::omega::SolveMethod;
use muskat_core::profiles::{gaussian, rough, wave_packet, ROUGH_EXPONENT};
use muskat_core::{FluidParams, Grid, GridFunction};
use serde::{Deserialize, Serialize};

use crate::snapshot::read_profile;

pub const DEFAULT_SNAPSHOT_EVERY: usize = 10;
pub const DEFAULT_OUTPUT_DIR: &str = "output";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Schema { path: PathBuf, message: String },
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
    #[error("initial condition `{name}`: {message}")]
    InitialCondition { name: String, message: String },
}

fn invalid(field: &str, message: impl fmt::Display) -> ConfigError {
    ConfigError::Invalid {
        field: field.into(),
        message: message.to_string(),
    }
}

/// Physical constants, as in [`FluidParams`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalParams {
    pub mu_minus: f64,
    pub mu_plus: f64,
    pub rho_minus: f64,
    pub rho_plus: f64,
    #[serde(default = "one")]
    pub gravity: f64,
    #[serde(default = "one")]
    pub permeability: f64,
    #[serde(default)]
    pub surface_tension: f64,
    #[serde(default)]
    pub far_field_speed: f64,
}

/// Parameters with `b_mu = 1`, see [`FluidParams::normalized`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalizedParams {
    pub atwood: f64,
    pub theta: f64,
    #[serde(default)]
    pub sigma: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub half_length: f64,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    Flat,
    Gaussian {
        amplitude: f64,
        #[serde(default = "one")]
        width: f64,
        #[serde(default)]
        centre: f64,
    },
    WavePacket {
        amplitude: f64,
        k: f64,
        #[serde(default = "three")]
        width: f64,
    },
    Rough {
        amplitude: f64,
        #[serde(default)]
        seed: u64,
        #[serde(default = "rough_exponent")]
        exponent: f64,
    },
    /// A snapshot file, or a CSV with header `x,f`, sampled on the configured grid.
    File { path: PathBuf },
}

fn three() -> f64 {
    3.0
}

fn rough_exponent() -> f64 {
    ROUGH_EXPONENT
}

impl InitialCondition {
    pub fn name(&self) -> String {
        match self {
            InitialCondition::Flat => "flat".into(),
            InitialCondition::Gaussian { .. } => "gaussian".into(),
            InitialCondition::WavePacket { .. } => "wave_packet".into(),
            InitialCondition::Rough { .. } => "rough".into(),
            InitialCondition::File { path } => format!("file {}", path.display()),
        }
    }

    /// Samples the initial condition on `g` and applies the decay check.
    pub fn sample(&self, g: &Grid) -> Result<GridFunction, ConfigError> {
        let fail = |message: String| ConfigError::InitialCondition {
            name: self.name(),
            message,
        };
        let f = match self {
            InitialCondition::Flat => Ok(GridFunction::zeros(g)),
            InitialCondition::Gaussian {
                amplitude,
                width,
                centre,
            } => gaussian(g, *amplitude, *width, *centre),
            InitialCondition::WavePacket { amplitude, k, width } => wave_packet(g, *amplitude, *k, *width),
            InitialCondition::Rough {
                amplitude,
                seed,
                exponent,
            } => rough(g, *amplitude, *exponent, *seed),
            InitialCondition::File { path } => return read_profile(path, g).map_err(|e| fail(e.to_string())),
        }
        .map_err(|e| fail(e.to_string()))?;
        f.check_decay(DEFAULT_DECAY_THRESHOLD).map_err(|e| fail(e.to_string()))?;
        Ok(f)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepperName {
    #[default]
    RkAdaptive,
    Imex,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethodName {
    #[default]
    Direct,
    Neumann,
}

/// Step controls; missing keys take the [`StepControls`] defaults.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControlsSpec {
    pub stepper: StepperName,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub cfl_c1: f64,
    pub cfl_c3: f64,
    pub enforce_rt: bool,
    pub rt_tolerance: Option<f64>,
    pub solve_method: SolveMethodName,
}

impl Default for ControlsSpec {
    fn default() -> Self {
        ControlsSpec::from(&StepControls::default())
    }
}

impl From<&StepControls> for ControlsSpec {
    fn from(c: &StepControls) -> Self {
        ControlsSpec {
            stepper: match c.stepper {
                Stepper::RkAdaptive => StepperName::RkAdaptive,
                Stepper::Imex => StepperName::Imex,
            },
            rel_tol: c.rel_tol,
            abs_tol: c.abs_tol,
            dt_init: c.dt_init,
            dt_min: c.dt_min,
            dt_max: c.dt_max,
            cfl_c1: c.cfl_c1,
            cfl_c3: c.cfl_c3,
            enforce_rt: c.enforce_rt,
            rt_tolerance: c.rt_tolerance,
            solve_method: match c.solve_method {
                SolveMethod::Direct => SolveMethodName::Direct,
                SolveMethod::Neumann => SolveMethodName::Neumann,
            },
        }
    }
}

impl ControlsSpec {
    pub fn to_controls(&self) -> StepControls {
        StepControls {
            dt_init: self.dt_init,
            dt_min: self.dt_min,
            dt_max: self.dt_max,
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            stepper: match self.stepper {
                StepperName::RkAdaptive => Stepper::RkAdaptive,
                StepperName::Imex => Stepper::Imex,
            },
            cfl_c1: self.cfl_c1,
            cfl_c3: self.cfl_c3,
            enforce_rt: self.enforce_rt,
            rt_tolerance: self.rt_tolerance,
            solve_method: match self.solve_method {
                SolveMethodName::Direct => SolveMethod::Direct,
                SolveMethodName::Neumann => SolveMethod::Neumann,
            },
        }
    }
}

/// The file as written, before validation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<PhysicalParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalized: Option<NormalizedParams>,
    pub grid: GridSpec,
    pub initial_condition: InitialCondition,
    pub t_end: f64,
    #[serde(default)]
    pub controls: ControlsSpec,
    #[serde(default = "default_snapshot_every")]
    pub snapshot_every: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_snapshot_every() -> usize {
    DEFAULT_SNAPSHOT_EVERY
}

fn default_output_dir() -> PathBuf {
    PathBuf::from(DEFAULT_OUTPUT_DIR)
}

/// A validated run configuration. Relative paths are resolved against the
/// directory of the file it was read from.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub raw: RawConfig,
    pub params: FluidParams,
    pub grid: Grid,
    pub f0: GridFunction,
    pub t_end: f64,
    pub controls: StepControls,
    pub snapshot_every: usize,
    pub output_dir: PathBuf,
}

impl RawConfig {
    pub fn from_toml(text: &str, origin: &Path) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Schema {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs serialize to TOML")
    }

    /// Makes relative paths absolute with respect to `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        if self.output_dir.is_relative() {
            self.output_dir = base.join(&self.output_dir);
        }
        if let InitialCondition::File { path } = &mut self.initial_condition {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
    }

    pub fn fluid_params(&self) -> Result<FluidParams, ConfigError> {
        let p = match (&self.params, &self.normalized) {
            (Some(p), None) => FluidParams {
                mu_minus: p.mu_minus,
                mu_plus: p.mu_plus,
                rho_minus: p.rho_minus,
                rho_plus: p.rho_plus,
                gravity: p.gravity,
                permeability: p.permeability,
                surface_tension: p.surface_tension,
                far_field_speed: p.far_field_speed,
            },
            (None, Some(n)) => {
                if n.sigma < 0.0 {
                    return Err(invalid("normalized.sigma", format!("must be nonnegative, got {}", n.sigma)));
                }
                FluidParams::normalized(n.atwood, n.theta, n.sigma).map_err(|e| invalid("normalized", e))?
            }
            (Some(_), Some(_)) => return Err(invalid("params", "give either [params] or [normalized], not both")),
            (None, None) => return Err(invalid("params", "missing: give a [params] or [normalized] table")),
        };
        let section = if self.params.is_some() { "params" } else { "normalized" };
        p.derive_constants().map_err(|e| invalid(section, e))?;
        Ok(p)
    }

    pub fn validate(self) -> Result<RunConfig, ConfigError> {
        let params = self.fluid_params()?;
        if !self.grid.n.is_multiple_of(2) {
            return Err(invalid("grid.n", format!("N must be even, got {}", self.grid.n)));
        }
        let grid = Grid::new(self.grid.half_length, self.grid.n).map_err(|e| invalid("grid", e))?;
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(invalid("t_end", format!("must be finite and >= 0, got {}", self.t_end)));
        }
        if self.snapshot_every == 0 {
            return Err(invalid("snapshot_every", "must be at least 1"));
        }
        let controls = self.controls.to_controls();
        controls.validate().map_err(|e| invalid("controls", e))?;
        if controls.stepper == Stepper::Imex && !params.has_surface_tension() {
            return Err(invalid("controls.stepper", "imex needs surface tension > 0"));
        }
        let f0 = self.initial_condition.sample(&grid)?;
        Ok(RunConfig {
            params,
            grid,
            f0,
            t_end: self.t_end,
            controls,
            snapshot_every: self.snapshot_every,
            output_dir: self.output_dir.clone(),
            raw: self,
        })
    }
}

/// Reads, resolves and validates a TOML config.
pub fn parse_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut raw = RawConfig::from_toml(&text, path)?;
    let base = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let base = std::path::absolute(base).map_err(|source| ConfigError::Io {
        path: base.to_path_buf(),
        source,
    })?;
    raw.resolve_paths(&base);
    raw.validate()
}
