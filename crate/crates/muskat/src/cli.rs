//! Command line. Exit codes: 0 success, 1 property failure or
//! Rayleigh-Taylor breakdown (or any other runtime failure), 2 usage or
//! configuration error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use muskat_core::evolution::{measure_rate, RateSetup};
use muskat_core::field::{LayerPotential, PressureField, PressureOptions};
use muskat_core::stability::evaluate_rt_with;
use muskat_core::{dispersion_rate, FluidParams};
use serde::Serialize;

use crate::config::{parse_config, ConfigError, RunConfig};
use crate::manifest::RunManifest;
use crate::run::{rerun, run_config};
use crate::snapshot::read_snapshot;
use crate::verify::Suite;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "muskat", version, about = "Two-phase Muskat interface simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a configuration (TOML) or re-run a manifest (JSON).
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory, overriding the one in the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the Rayleigh-Taylor report of the initial condition (or of a snapshot) as JSON.
    CheckRt {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        snapshot: Option<PathBuf>,
    },
    /// Print predicted (and optionally measured) linear rates about the flat state.
    Dispersion {
        #[arg(long)]
        sigma: f64,
        /// Comma-separated wavenumbers.
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<f64>,
        /// Take the fluid parameters from this config; `--sigma` still applies.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        atwood: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        theta: f64,
        /// Also measure each rate with a small wave packet.
        #[arg(long)]
        measure: bool,
    },
    /// Run a property suite.
    Verify {
        /// operators, rellich, plemelj, dispersion, smoothing, rt-gate or all.
        #[arg(long)]
        suite: String,
    },
    /// Velocity (and pressure, given a config) at the points of a CSV file with header `x,y`.
    Reconstruct {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output CSV; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn runtime(e: impl std::fmt::Display) -> Self {
        Failure {
            code: EXIT_FAILURE,
            message: e.to_string(),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: e.to_string(),
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run(args: impl IntoIterator<Item = impl Into<OsString> + Clone>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
                return EXIT_USAGE;
            }
            let _ = write!(out, "{text}");
            return EXIT_OK;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Simulate { config, out: dir } => simulate(&config, dir.as_deref(), out),
        Command::CheckRt { config, snapshot } => check_rt(&config, snapshot.as_deref(), out),
        Command::Dispersion {
            sigma,
            k,
            config,
            atwood,
            theta,
            measure,
        } => dispersion(sigma, &k, config.as_deref(), atwood, theta, measure, out),
        Command::Verify { suite } => verify(&suite, out),
        Command::Reconstruct {
            snapshot,
            points,
            config,
            out: target,
        } => reconstruct(&snapshot, &points, config.as_deref(), target.as_deref(), out),
    }
}

fn is_manifest(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "json")
}

fn simulate(config: &Path, dir: Option<&Path>, out: &mut dyn Write) -> Result<i32, Failure> {
    let outcome = if is_manifest(config) {
        rerun(config, dir).map_err(|e| match e {
            crate::run::RunError::Config(c) => c.into(),
            other => Failure::runtime(other),
        })?
    } else {
        let mut cfg = parse_config(config)?;
        if let Some(d) = dir {
            cfg.output_dir = d.to_path_buf();
            cfg.raw.output_dir = d.to_path_buf();
        }
        run_config(&cfg).map_err(Failure::runtime)?
    };
    let m = &outcome.manifest;
    let _ = writeln!(
        out,
        "{}: t = {} with {} snapshots; manifest {}",
        m.termination,
        m.final_time,
        m.snapshots.len(),
        outcome.manifest_path.display()
    );
    if let Some(e) = &m.error {
        let _ = writeln!(out, "{e}");
    }
    Ok(outcome.exit_code())
}

fn load_config(path: &Path) -> Result<RunConfig, Failure> {
    if is_manifest(path) {
        let m = RunManifest::read(path).map_err(Failure::runtime)?;
        Ok(m.config.validate()?)
    } else {
        Ok(parse_config(path)?)
    }
}

#[derive(Serialize)]
struct RtJson {
    #[serde(rename = "in_O")]
    in_o: bool,
    infimum: f64,
    tolerance: f64,
    c_rho_mu: f64,
    argmin_x: f64,
}

fn check_rt(config: &Path, snapshot: Option<&Path>, out: &mut dyn Write) -> Result<i32, Failure> {
    let cfg = load_config(config)?;
    let f = match snapshot {
        Some(path) => read_snapshot(path).map_err(Failure::runtime)?.f,
        None => cfg.f0.clone(),
    };
    let c = cfg.params.derive_constants().map_err(Failure::runtime)?;
    let tol = cfg
        .controls
        .rt_tolerance
        .unwrap_or_else(|| muskat_core::stability::default_rt_tolerance(&c));
    let report = evaluate_rt_with(&f, &c, tol, cfg.controls.solve_method).map_err(Failure::runtime)?;
    let argmin = report
        .a_rt
        .values()
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(j, _)| f.grid().node(j))
        .unwrap_or(0.0);
    let json = RtJson {
        in_o: report.in_o,
        infimum: report.infimum,
        tolerance: report.tolerance,
        c_rho_mu: c.c_rho_mu,
        argmin_x: argmin,
    };
    let _ = writeln!(out, "{}", serde_json::to_string(&json).expect("report serializes"));
    Ok(if report.in_o { EXIT_OK } else { EXIT_FAILURE })
}

fn dispersion(
    sigma: f64,
    ks: &[f64],
    config: Option<&Path>,
    atwood: f64,
    theta: f64,
    measure: bool,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Failure {
            code: EXIT_USAGE,
            message: format!("--sigma must be finite and >= 0, got {sigma}"),
        });
    }
    let base = match config {
        Some(path) => load_config(path)?.params,
        None => FluidParams::normalized(atwood, theta, 0.0).map_err(|e| Failure {
            code: EXIT_USAGE,
            message: e.to_string(),
        })?,
    };
    let p = base.with_surface_tension(sigma);
    let c = p.derive_constants().map_err(|e| Failure {
        code: EXIT_USAGE,
        message: e.to_string(),
    })?;
    let _ = writeln!(out, "{}", if measure { "k,predicted,measured,relative_error" } else { "k,rate" });
    let mut ok = true;
    for &k in ks {
        let rate = dispersion_rate(k, sigma > 0.0, &c).map_err(|e| Failure {
            code: EXIT_USAGE,
            message: e.to_string(),
        })?;
        if measure {
            let m = measure_rate(&p, k, &RateSetup::default()).map_err(Failure::runtime)?;
            ok &= m.relative_error() <= 0.03;
            let _ = writeln!(out, "{k},{rate},{},{:.3e}", m.measured, m.relative_error());
        } else {
            let _ = writeln!(out, "{k},{rate}");
        }
    }
    Ok(if ok { EXIT_OK } else { EXIT_FAILURE })
}

fn verify(name: &str, out: &mut dyn Write) -> Result<i32, Failure> {
    let suites: Vec<Suite> = if name == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![name.parse::<Suite>().map_err(|message| Failure {
            code: EXIT_USAGE,
            message,
        })?]
    };
    let mut ok = true;
    for suite in suites {
        for report in suite.run().map_err(Failure::runtime)? {
            ok &= report.passed();
            let _ = write!(out, "[{}] {report}", suite.name());
        }
    }
    let _ = writeln!(out, "{}", if ok { "all checks passed" } else { "some checks FAILED" });
    Ok(if ok { EXIT_OK } else { EXIT_FAILURE })
}

/// Reads a points file with header `x,y`.
pub fn read_points(path: &Path) -> Result<Vec<(f64, f64)>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "x,y" => {}
        _ => return Err(format!("{}, line 1: expected header `x,y`", path.display())),
    }
    let mut pts = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let parsed: Vec<Result<f64, _>> = line.split(',').map(|c| c.trim().parse::<f64>()).collect();
        match parsed.as_slice() {
            [Ok(x), Ok(y)] => pts.push((*x, *y)),
            _ => return Err(format!("{}, line {}: expected two numbers", path.display(), i + 1)),
        }
    }
    Ok(pts)
}

fn reconstruct(
    snapshot: &Path,
    points: &Path,
    config: Option<&Path>,
    target: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let snap = read_snapshot(snapshot).map_err(Failure::runtime)?;
    let pts = read_points(points).map_err(|message| Failure {
        code: EXIT_USAGE,
        message,
    })?;
    let params = config.map(load_config).transpose()?.map(|c| c.params);
    let mut text = String::from("x,y,side,u,v,pressure\n");
    match params {
        Some(p) => {
            let field =
                PressureField::new(&snap.f, &snap.omega, &p, &PressureOptions::default()).map_err(Failure::runtime)?;
            let lp = LayerPotential::new(&snap.f, &snap.omega).map_err(Failure::runtime)?;
            for &(x, y) in &pts {
                let (side, pressure) = field.pressure(x, y).map_err(Failure::runtime)?;
                let (u, v) = lp.velocity_unchecked(x, y);
                text.push_str(&format!("{x:.16e},{y:.16e},{},{u:.16e},{v:.16e},{pressure:.16e}\n", side.as_str()));
            }
        }
        None => {
            let lp = LayerPotential::new(&snap.f, &snap.omega).map_err(Failure::runtime)?;
            for &(x, y) in &pts {
                let s = lp.sample(x, y).map_err(Failure::runtime)?;
                text.push_str(&format!(
                    "{x:.16e},{y:.16e},{},{:.16e},{:.16e},\n",
                    s.side.as_str(),
                    s.velocity.0,
                    s.velocity.1
                ));
            }
        }
    }
    match target {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))?,
        None => {
            let _ = write!(out, "{text}");
        }
    }
    Ok(EXIT_OK)
}
