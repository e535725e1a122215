//! Snapshot files: one JSON header line, then CSV with header `x,f,omega`.
//!
//! Values are written with 17 significant digits, so reading a file back
//! gives the same doubles.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use muskat_core::evolution::{Diagnostics, Snapshot};
use muskat_core::{Grid, GridFunction};
use serde::{Deserialize, Serialize};

pub const FORMAT: &str = "muskat-snapshot";
pub const VERSION: u32 = 1;
pub const CSV_HEADER: &str = "x,f,omega";

#[derive(Debug, thiserror::Error)]
pub enum SnapshotError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}, line {line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridHeader {
    pub half_length: f64,
    pub n: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsHeader {
    pub mass: f64,
    pub sup_norm: f64,
    pub sobolev: f64,
    pub rt_infimum: Option<f64>,
    pub max_rhs: f64,
    pub boundary_decay: f64,
}

impl From<&Diagnostics> for DiagnosticsHeader {
    fn from(d: &Diagnostics) -> Self {
        DiagnosticsHeader {
            mass: d.mass,
            sup_norm: d.sup_norm,
            sobolev: d.sobolev,
            rt_infimum: d.rt_infimum,
            max_rhs: d.max_rhs,
            boundary_decay: d.boundary_decay,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub format: String,
    pub version: u32,
    pub t: f64,
    pub grid: GridHeader,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub dt_next: f64,
    pub diagnostics: DiagnosticsHeader,
}

/// Contents of a snapshot file.
#[derive(Clone, Debug, PartialEq)]
pub struct SnapshotData {
    pub header: SnapshotHeader,
    pub grid: Grid,
    pub f: GridFunction,
    pub omega: GridFunction,
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> SnapshotError + '_ {
    move |source| SnapshotError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// File name of the `index`-th snapshot of a run.
pub fn snapshot_name(index: usize) -> String {
    format!("snapshot_{index:05}.csv")
}

pub fn render_snapshot(snap: &Snapshot) -> String {
    let g = snap.f.grid();
    let header = SnapshotHeader {
        format: FORMAT.into(),
        version: VERSION,
        t: snap.t,
        grid: GridHeader {
            half_length: g.half_length(),
            n: g.len(),
        },
        accepted_steps: snap.accepted_steps,
        rejected_steps: snap.rejected_steps,
        dt_next: snap.dt_next,
        diagnostics: (&snap.diagnostics).into(),
    };
    let mut out = serde_json::to_string(&header).expect("headers serialize");
    out.push('\n');
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (j, x) in g.nodes().enumerate() {
        let _ = writeln!(out, "{:.16e},{:.16e},{:.16e}", x, snap.f.values()[j], snap.omega.omega.values()[j]);
    }
    out
}

/// Writes `snap` as `dir/name` and returns the path.
pub fn write_snapshot(snap: &Snapshot, dir: &Path, name: &str) -> Result<PathBuf, SnapshotError> {
    fs::create_dir_all(dir).map_err(io(dir))?;
    let path = dir.join(name);
    fs::write(&path, render_snapshot(snap)).map_err(io(&path))?;
    Ok(path)
}

pub fn read_snapshot(path: &Path) -> Result<SnapshotData, SnapshotError> {
    let text = fs::read_to_string(path).map_err(io(path))?;
    parse_snapshot(&text, path)
}

pub fn parse_snapshot(text: &str, path: &Path) -> Result<SnapshotData, SnapshotError> {
    let err = |line: usize, message: String| SnapshotError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines();
    let first = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let header: SnapshotHeader =
        serde_json::from_str(first).map_err(|e| err(1, format!("malformed header: {e}")))?;
    if header.format != FORMAT || header.version != VERSION {
        return Err(err(1, format!("unsupported format {} version {}", header.format, header.version)));
    }
    let grid = Grid::new(header.grid.half_length, header.grid.n).map_err(|e| err(1, e.to_string()))?;
    match lines.next() {
        Some(CSV_HEADER) => {}
        other => return Err(err(2, format!("expected `{CSV_HEADER}`, found {other:?}"))),
    }
    let (xs, columns) = parse_rows(lines, 3, 3, &err)?;
    check_nodes(&grid, &xs, &err)?;
    let f = GridFunction::new(&grid, columns[0].clone()).map_err(|e| err(3, e.to_string()))?;
    let omega = GridFunction::new(&grid, columns[1].clone()).map_err(|e| err(3, e.to_string()))?;
    Ok(SnapshotData { header, grid, f, omega })
}

type Columns = (Vec<f64>, Vec<Vec<f64>>);

fn parse_rows<'a>(
    lines: impl Iterator<Item = &'a str>,
    first_line: usize,
    width: usize,
    err: &impl Fn(usize, String) -> SnapshotError,
) -> Result<Columns, SnapshotError> {
    let mut xs = Vec::new();
    let mut columns = vec![Vec::new(); width - 1];
    for (i, line) in lines.enumerate() {
        let number = first_line + i;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != width {
            return Err(err(number, format!("expected {width} fields, found {}", cells.len())));
        }
        let mut values = Vec::with_capacity(width);
        for cell in cells {
            values.push(
                cell.trim()
                    .parse::<f64>()
                    .map_err(|e| err(number, format!("bad number `{cell}`: {e}")))?,
            );
        }
        xs.push(values[0]);
        for (c, v) in columns.iter_mut().zip(&values[1..]) {
            c.push(*v);
        }
    }
    Ok((xs, columns))
}

fn check_nodes(grid: &Grid, xs: &[f64], err: &impl Fn(usize, String) -> SnapshotError) -> Result<(), SnapshotError> {
    if xs.len() != grid.len() {
        return Err(err(
            3,
            format!("grid has {} nodes but the file has {} rows", grid.len(), xs.len()),
        ));
    }
    let tol = 1e-9 * grid.spacing();
    for (j, (&x, node)) in xs.iter().zip(grid.nodes()).enumerate() {
        if (x - node).abs() > tol {
            return Err(err(3 + j, format!("x = {x} does not match grid node {node}")));
        }
    }
    Ok(())
}

/// Reads an initial profile for grid `g`: either a snapshot file on the same
/// grid, or a CSV with header `x,f` whose `x` column is the grid nodes.
pub fn read_profile(path: &Path, g: &Grid) -> Result<GridFunction, SnapshotError> {
    let text = fs::read_to_string(path).map_err(io(path))?;
    let err = |line: usize, message: String| SnapshotError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let first = text.lines().next().unwrap_or("");
    if first.trim_start().starts_with('{') {
        let snap = parse_snapshot(&text, path)?;
        if snap.grid != *g {
            return Err(err(1, "snapshot grid differs from the configured grid".into()));
        }
        return Ok(snap.f);
    }
    if first.trim() != "x,f" {
        return Err(err(1, format!("expected header `x,f`, found `{first}`")));
    }
    let (xs, columns) = parse_rows(text.lines().skip(1), 2, 2, &err)?;
    check_nodes(g, &xs, &err)?;
    GridFunction::new(g, columns[0].clone()).map_err(|e| err(2, e.to_string()))
}
