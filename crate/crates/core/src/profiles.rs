//! Initial-condition families and the fixed test families used by the
//! verification suites.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::grid::GridFunction;
use crate::math;

/// `amp exp(-((x - centre) / width)^2)`.
pub fn gaussian(g: &Grid, amp: f64, width: f64, centre: f64) -> Result<GridFunction> {
    positive("width", width)?;
    Ok(GridFunction::from_fn(g, |x| {
        let s = (x - centre) / width;
        amp * math::exp(-s * s)
    }))
}

/// `amp exp(-(x / width)^2) cos(k x)`.
pub fn wave_packet(g: &Grid, amp: f64, k: f64, width: f64) -> Result<GridFunction> {
    positive("width", width)?;
    if !k.is_finite() {
        return Err(Error::InvalidWavenumber(k));
    }
    Ok(GridFunction::from_fn(g, |x| {
        let s = x / width;
        amp * math::exp(-s * s) * math::cos(k * x)
    }))
}

/// Default decay exponent of [`rough`].
pub const ROUGH_EXPONENT: f64 = 2.6;

/// Random cosine series with `|c_m| = (1 + m)^(-exponent)` for every grid mode
/// `m >= 1`, phases drawn from a ChaCha8 stream seeded with `seed`, times the
/// window `exp(-(x / (L / 2))^8)`, rescaled so that `max |f| = amp`.
pub fn rough(g: &Grid, amp: f64, exponent: f64, seed: u64) -> Result<GridFunction> {
    if !(exponent.is_finite() && amp.is_finite()) {
        return Err(Error::InvalidControls("rough profile needs finite amp and exponent".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modes: Vec<(f64, f64, f64)> = (1..g.nyquist())
        .map(|m| {
            let phase = rng.gen::<f64>() * 2.0 * core::f64::consts::PI;
            (g.wavenumber(m), math::powf(1.0 + m as f64, -exponent), phase)
        })
        .collect();
    let half = 0.5 * g.half_length();
    let raw = GridFunction::from_fn(g, |x| {
        let series: f64 = modes.iter().map(|&(xi, c, ph)| c * math::cos(xi * x + ph)).sum();
        series * math::exp(-math::powi(x / half, 8))
    });
    let peak = raw.max_abs();
    if peak == 0.0 {
        return Ok(raw);
    }
    Ok(raw.scale(amp / peak))
}

fn positive(what: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidControls(alloc::format!("{what} must be positive, got {v}")))
    }
}

/// An interface, a sheet strength and a label.
#[derive(Clone, Debug, PartialEq)]
pub struct TestCase {
    pub name: &'static str,
    pub f: GridFunction,
    pub omega: GridFunction,
}

fn case(g: &Grid, name: &'static str, f: impl Fn(f64) -> f64, w: impl Fn(f64) -> f64) -> TestCase {
    TestCase {
        name,
        f: GridFunction::from_fn(g, f),
        omega: GridFunction::from_fn(g, w),
    }
}

/// Sheet strengths with vanishing low-order moments, so that the periodic
/// and line Hilbert transforms agree on `[-L, L)` to well below `1e-6`.
pub fn operator_omegas(g: &Grid) -> Vec<(&'static str, GridFunction)> {
    let e = |x: f64, s: f64| math::exp(-x * x / s);
    [
        ("packet-k4", GridFunction::from_fn(g, |x| e(x, 4.0) * math::cos(4.0 * x))),
        ("packet-k6", GridFunction::from_fn(g, |x| e(x, 2.0) * math::sin(6.0 * x))),
        ("packet-k3-wide", GridFunction::from_fn(g, |x| e(x, 9.0) * math::cos(3.0 * x + 0.4))),
        ("packet-k5", GridFunction::from_fn(g, |x| e(x, 3.0) * math::sin(5.0 * x + 0.3))),
        (
            "hermite5",
            GridFunction::from_fn(g, |x| {
                (32.0 * math::powi(x, 5) - 160.0 * math::powi(x, 3) + 120.0 * x) * e(x, 1.0) / 8.0
            }),
        ),
    ]
    .into_iter()
    .collect()
}

/// Interfaces paired with [`operator_omegas`] for the composition checks.
pub fn operator_family(g: &Grid) -> Vec<TestCase> {
    type Profile = (&'static str, fn(f64) -> f64);
    let interfaces: [Profile; 5] = [
        ("gaussian", |x| 0.8 * math::exp(-x * x)),
        ("offset-gaussian", |x| 0.5 * math::exp(-(x - 0.7) * (x - 0.7) / 2.0)),
        ("trough", |x| -0.6 * math::exp(-x * x / 0.5)),
        ("two-bumps", |x| {
            0.4 * math::exp(-(x - 1.0) * (x - 1.0)) - 0.3 * math::exp(-(x + 1.5) * (x + 1.5) / 0.7)
        }),
        ("wide", |x| 0.2 * math::exp(-x * x / 8.0)),
    ];
    interfaces
        .iter()
        .zip(operator_omegas(g))
        .map(|(&(name, f), (_, omega))| TestCase {
            name,
            f: GridFunction::from_fn(g, f),
            omega,
        })
        .collect()
}

/// Narrow interfaces with odd or oscillating sheets, used to check the
/// derivative identities under refinement.
pub fn derivative_family(g: &Grid) -> Vec<TestCase> {
    alloc::vec![
        case(g, "narrow-odd", |x| 0.3 * math::exp(-x * x / 0.04), |x| x * math::exp(-x * x / 0.05)),
        case(g, "narrow-packet", |x| 0.3 * math::exp(-x * x / 0.02), |x| {
            math::exp(-x * x / 0.5) * math::sin(3.0 * x)
        }),
    ]
}

/// The Rellich-identity family.
pub fn rellich_family(g: &Grid) -> Vec<TestCase> {
    alloc::vec![
        case(g, "packet", |x| 0.3 * math::exp(-x * x / 0.1), |x| {
            math::exp(-x * x / 2.0) * math::sin(6.0 * x)
        }),
        case(g, "hermite3", |x| 0.3 * math::exp(-x * x / 0.04), |x| {
            (8.0 * math::powi(x, 3) - 12.0 * x) * math::exp(-x * x)
        }),
    ]
}

/// Smooth interfaces and sheets for the trace and off-interface checks.
pub fn plemelj_family(g: &Grid) -> Vec<TestCase> {
    alloc::vec![
        case(g, "gaussian", |x| 0.4 * math::exp(-x * x), |x| math::exp(-x * x / 2.0)),
        case(g, "tilted", |x| 0.3 * math::exp(-(x - 0.5) * (x - 0.5)), |x| x * math::exp(-x * x)),
        case(g, "flat", |_| 0.0, |x| math::exp(-x * x) * math::cos(2.0 * x)),
    ]
}
