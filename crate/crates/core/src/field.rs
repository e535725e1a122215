//! Velocity and pressure off the interface, one-sided traces, and the
//! Rellich residuals.
//!
//! The velocity is the layer potential
//! `v(x, y) = (1 / 2 pi) int (-(y - f(s)), x - s) / ((x - s)^2 + (y - f(s))^2) omega(s) ds`,
//! evaluated with the trapezoid rule on the grid. Points closer than `2h`
//! (vertically) to the interface are rejected.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::kernels::{apply_a, apply_b};
use crate::math;
use crate::params::FluidParams;
use crate::spectral::{derivatives12, spectral_derivative, Interpolant};

/// Guard band around the interface, in grid spacings.
pub const GUARD_BAND: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Above,
    Below,
    OnInterface,
}

impl Side {
    pub fn as_str(&self) -> &'static str {
        match self {
            Side::Above => "above",
            Side::Below => "below",
            Side::OnInterface => "on_interface",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldSample {
    pub x: f64,
    pub y: f64,
    pub velocity: (f64, f64),
    /// Moving-frame pressure, when it was requested.
    pub pressure: Option<f64>,
    pub side: Side,
}

/// Interface samples prepared for repeated off-interface evaluation.
pub struct LayerPotential {
    xs: Vec<f64>,
    fs: Vec<f64>,
    weights: Vec<f64>,
    interp: Interpolant,
    band: f64,
    max_f: f64,
}

impl LayerPotential {
    pub fn new(f: &GridFunction, omega: &GridFunction) -> Result<Self> {
        f.ensure_same_grid(omega)?;
        if !(f.is_finite() && omega.is_finite()) {
            return Err(Error::NonFinite("layer potential data"));
        }
        let g = f.grid();
        let h = g.spacing();
        Ok(LayerPotential {
            xs: g.nodes().collect(),
            fs: f.values().to_vec(),
            weights: omega.values().iter().map(|w| h * w / (2.0 * PI)).collect(),
            interp: Interpolant::new(f),
            band: GUARD_BAND * h,
            max_f: f.max_abs(),
        })
    }

    /// Interface height at `x` from the trigonometric interpolant.
    pub fn height(&self, x: f64) -> f64 {
        self.interp.eval(x)
    }

    pub fn guard_band(&self) -> f64 {
        self.band
    }

    pub fn side(&self, x: f64, y: f64) -> Result<Side> {
        let gap = y - self.height(x);
        if gap.abs() < self.band * (1.0 - 1e-9) {
            Err(Error::PointTooClose { x, y, band: self.band })
        } else if gap > 0.0 {
            Ok(Side::Above)
        } else {
            Ok(Side::Below)
        }
    }

    /// Trapezoid sum without the guard-band check.
    pub fn velocity_unchecked(&self, x: f64, y: f64) -> (f64, f64) {
        let (mut v1, mut v2) = (0.0, 0.0);
        for l in 0..self.xs.len() {
            let dx = x - self.xs[l];
            let dy = y - self.fs[l];
            let w = self.weights[l] / (dx * dx + dy * dy);
            v1 -= dy * w;
            v2 += dx * w;
        }
        (v1, v2)
    }

    pub fn velocity(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        self.side(x, y)?;
        Ok(self.velocity_unchecked(x, y))
    }

    pub fn sample(&self, x: f64, y: f64) -> Result<FieldSample> {
        let side = self.side(x, y)?;
        Ok(FieldSample {
            x,
            y,
            velocity: self.velocity_unchecked(x, y),
            pressure: None,
            side,
        })
    }
}

/// Layer-potential velocity at each point.
pub fn biot_savart(f: &GridFunction, omega: &GridFunction, points: &[(f64, f64)]) -> Result<Vec<FieldSample>> {
    let lp = LayerPotential::new(f, omega)?;
    points.iter().map(|&(x, y)| lp.sample(x, y)).collect()
}

/// `|v(x, R)| R` for each radius, a check of the `1/r` far-field decay.
pub fn far_field_profile(f: &GridFunction, omega: &GridFunction, x: f64, radii: &[f64]) -> Result<Vec<f64>> {
    let lp = LayerPotential::new(f, omega)?;
    radii
        .iter()
        .map(|&r| {
            let (v1, v2) = lp.velocity(x, r)?;
            Ok(math::hypot(v1, v2) * r)
        })
        .collect()
}

/// One-sided limits of the velocity on the interface:
/// the principal value `((A omega / 2)(1, f') + (B omega / 2 pi)(-f', 1)) / (1 + f'^2)`
/// minus (above) or plus (below) `(1, f') omega / (2 (1 + f'^2))`.
/// [`Side::OnInterface`] gives the principal value alone.
pub fn trace_velocity(f: &GridFunction, omega: &GridFunction, side: Side) -> Result<(GridFunction, GridFunction)> {
    let fp = spectral_derivative(f, 1)?;
    let a = apply_a(f, omega)?;
    let b = apply_b(f, omega)?;
    let jump = match side {
        Side::Above => -0.5,
        Side::Below => 0.5,
        Side::OnInterface => 0.0,
    };
    let n = f.len();
    let (mut v1, mut v2) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for j in 0..n {
        let d = fp.values()[j];
        let s = 1.0 + d * d;
        let tangential = 0.5 * a.values()[j] + jump * omega.values()[j];
        let normal = b.values()[j] / (2.0 * PI);
        v1.push((tangential - normal * d) / s);
        v2.push((tangential * d + normal) / s);
    }
    Ok((GridFunction::new(f.grid(), v1)?, GridFunction::new(f.grid(), v2)?))
}

/// Normal velocity `<v, (-f', 1)> = (1 / 2 pi) B(f)[omega]`, the same on both sides.
pub fn normal_trace(f: &GridFunction, omega: &GridFunction) -> Result<GridFunction> {
    Ok(apply_b(f, omega)?.scale(1.0 / (2.0 * PI)))
}

/// Quadrature residuals of the Rellich identity
/// `int [F^2 + f' F (A -+ 1) omega - |(A -+ 1) omega|^2 / 4] / (1 + f'^2) dx = 0`
/// with `F` the normal trace; `r_plus` uses `A - 1`, `r_minus` uses `A + 1`.
pub fn rellich_residual(f: &GridFunction, omega: &GridFunction) -> Result<(f64, f64)> {
    let fp = spectral_derivative(f, 1)?;
    let big_f = normal_trace(f, omega)?;
    let a = apply_a(f, omega)?;
    let h = f.grid().spacing();
    let (mut plus, mut minus) = (0.0, 0.0);
    for j in 0..f.len() {
        let d = fp.values()[j];
        let nu = big_f.values()[j];
        let w = omega.values()[j];
        let term = |m: f64| nu * nu + d * nu * m - 0.25 * m * m;
        let s = 1.0 + d * d;
        plus += term(a.values()[j] - w) / s;
        minus += term(a.values()[j] + w) / s;
    }
    Ok((h * plus, h * minus))
}

/// Settings for [`reconstruct_pressure`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PressureOptions {
    /// Height of the horizontal integration paths `y = +-d`; `None` means
    /// `max |f| + 10 h`.
    pub anchor: Option<f64>,
    /// Number of nodes on each side of `x = 0` used to fix `c_+`.
    pub probe_half_width: usize,
}

impl Default for PressureOptions {
    fn default() -> Self {
        PressureOptions {
            anchor: None,
            probe_half_width: 3,
        }
    }
}

const GL4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_8),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_8),
];

/// `int_a^b g` by composite 4-point Gauss-Legendre with panels no longer than `panel`.
fn gauss(a: f64, b: f64, panel: f64, g: impl Fn(f64) -> f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = math::ceil((b - a).abs() / panel).max(1.0) as usize;
    let step = (b - a) / m as f64;
    let mut total = 0.0;
    for k in 0..m {
        let mid = a + (k as f64 + 0.5) * step;
        for &(t, w) in GL4.iter() {
            total += w * g(mid + 0.5 * step * t);
        }
    }
    0.5 * step * total
}

/// Moving-frame pressure on both sides of the interface.
///
/// `p_+-(x, y) = c_+- - (mu_+- / k) int_0^x v1(s, +-d) ds - (mu_+- / k) int_{+-d}^y v2(x, s) ds
/// - (rho_+- g + mu_+- V / k) y`, with `c_- = 0` and `c_+` fitted so that
/// `p_+ - p_- = sigma kappa(f)` near `x = 0` in the least-squares sense.
pub struct PressureField {
    lp: LayerPotential,
    params: FluidParams,
    anchor: f64,
    h: f64,
    c_plus: f64,
    trace_above: Vec<f64>,
    trace_below: Vec<f64>,
}

impl PressureField {
    pub fn new(f: &GridFunction, omega: &GridFunction, p: &FluidParams, opts: &PressureOptions) -> Result<Self> {
        p.validate()?;
        let lp = LayerPotential::new(f, omega)?;
        let h = f.grid().spacing();
        let anchor = opts.anchor.unwrap_or(lp.max_f + 10.0 * h);
        if !(anchor > lp.max_f + lp.band) {
            return Err(Error::PathCrossesInterface { x: 0.0, y: anchor });
        }
        let mut field = PressureField {
            lp,
            params: *p,
            anchor,
            h,
            c_plus: 0.0,
            trace_above: trace_velocity(f, omega, Side::Above)?.1.into_values(),
            trace_below: trace_velocity(f, omega, Side::Below)?.1.into_values(),
        };
        let probes = probe_nodes(f, opts.probe_half_width);
        let kappa = curvature(f);
        let mut sum = 0.0;
        for &j in &probes {
            let (above, below) = field.interface_values(f, j);
            sum += p.surface_tension * kappa.values()[j] - (above - below);
        }
        field.c_plus = sum / probes.len() as f64;
        Ok(field)
    }

    pub fn c_plus(&self) -> f64 {
        self.c_plus
    }

    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    fn uncalibrated(&self, x: f64, y: f64, side: Side) -> f64 {
        let p = &self.params;
        let (mu, rho, d) = match side {
            Side::Above => (p.mu_plus, p.rho_plus, self.anchor),
            _ => (p.mu_minus, p.rho_minus, -self.anchor),
        };
        let k = p.permeability;
        let horizontal = gauss(0.0, x, self.h, |s| self.lp.velocity_unchecked(s, d).0);
        let vertical = gauss(d, y, 0.5 * self.h, |s| self.lp.velocity_unchecked(x, s).1);
        -(mu / k) * (horizontal + vertical) - (rho * p.gravity + mu * p.far_field_speed / k) * y
    }

    /// Pressure at an off-interface point.
    pub fn pressure(&self, x: f64, y: f64) -> Result<(Side, f64)> {
        let side = self.lp.side(x, y)?;
        let offset = if side == Side::Above { self.c_plus } else { 0.0 };
        Ok((side, offset + self.uncalibrated(x, y, side)))
    }

    /// One-sided interface pressures at node `j`: the path stops at the edge of
    /// the guard band and the last `2h` is integrated with the cubic through the
    /// trace and the field at offsets `2h, 4h, 6h`.
    fn interface_values(&self, f: &GridFunction, j: usize) -> (f64, f64) {
        let x = f.grid().node(j);
        let height = f.values()[j];
        let band = self.lp.band;
        let p = &self.params;
        let k = p.permeability;
        let side_value = |side: Side, sign: f64, trace: f64, mu: f64, rho: f64| {
            let v = |m: f64| self.lp.velocity_unchecked(x, height + sign * m * band).1;
            let tail = band * (9.0 * trace + 19.0 * v(1.0) - 5.0 * v(2.0) + v(3.0)) / 24.0;
            let edge = self.uncalibrated(x, height + sign * band, side);
            edge + sign * (mu / k * tail + (rho * p.gravity + mu * p.far_field_speed / k) * band)
        };
        (
            side_value(Side::Above, 1.0, self.trace_above[j], p.mu_plus, p.rho_plus),
            side_value(Side::Below, -1.0, self.trace_below[j], p.mu_minus, p.rho_minus),
        )
    }

    /// `p_+ - p_- - sigma kappa(f)` at the given nodes.
    pub fn jump_residual(&self, f: &GridFunction, nodes: &[usize]) -> Vec<f64> {
        let kappa = curvature(f);
        nodes
            .iter()
            .map(|&j| {
                let (above, below) = self.interface_values(f, j);
                self.c_plus + above - below - self.params.surface_tension * kappa.values()[j]
            })
            .collect()
    }

    /// `v + (0, V) + (k / mu)(grad p + (0, rho g))` with the gradient from
    /// fourth-order centred differences of spacing `h / 4`.
    pub fn darcy_residual(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        let (side, _) = self.pressure(x, y)?;
        let e = 0.25 * self.h;
        let pick = |dx: f64, dy: f64| -> Result<f64> {
            let (s, v) = self.pressure(x + dx, y + dy)?;
            if s != side {
                return Err(Error::PointTooClose { x, y, band: self.lp.band });
            }
            Ok(v)
        };
        let dpx = (8.0 * (pick(e, 0.0)? - pick(-e, 0.0)?) - (pick(2.0 * e, 0.0)? - pick(-2.0 * e, 0.0)?)) / (12.0 * e);
        let dpy = (8.0 * (pick(0.0, e)? - pick(0.0, -e)?) - (pick(0.0, 2.0 * e)? - pick(0.0, -2.0 * e)?)) / (12.0 * e);
        let p = &self.params;
        let (mu, rho) = match side {
            Side::Above => (p.mu_plus, p.rho_plus),
            _ => (p.mu_minus, p.rho_minus),
        };
        let (v1, v2) = self.lp.velocity_unchecked(x, y);
        let k = p.permeability;
        Ok((v1 + k / mu * dpx, v2 + p.far_field_speed + k / mu * (dpy + rho * p.gravity)))
    }
}

/// The `2 half + 1` nodes around `x = 0`.
pub fn probe_nodes(f: &GridFunction, half: usize) -> Vec<usize> {
    let n = f.len();
    let centre = n / 2;
    let lo = centre.saturating_sub(half);
    let hi = (centre + half).min(n - 1);
    (lo..=hi).collect()
}

/// `f'' / (1 + f'^2)^{3/2}`.
pub fn curvature(f: &GridFunction) -> GridFunction {
    let (fp, fpp) = derivatives12(f);
    fp.zip_map(&fpp, |d1, d2| {
        let s = 1.0 + d1 * d1;
        d2 / (s * math::sqrt(s))
    })
}

/// Velocity and calibrated pressure at each point.
pub fn reconstruct_pressure(
    f: &GridFunction,
    omega: &GridFunction,
    p: &FluidParams,
    points: &[(f64, f64)],
    opts: &PressureOptions,
) -> Result<Vec<FieldSample>> {
    let field = PressureField::new(f, omega, p, opts)?;
    points
        .iter()
        .map(|&(x, y)| {
            let (side, pressure) = field.pressure(x, y)?;
            Ok(FieldSample {
                x,
                y,
                velocity: field.lp.velocity_unchecked(x, y),
                pressure: Some(pressure),
                side,
            })
        })
        .collect()
}

/// Divergence and curl of the layer potential at `(x, y)` by fourth-order
/// centred differences with spacing `step`.
pub fn div_curl(f: &GridFunction, omega: &GridFunction, x: f64, y: f64, step: f64) -> Result<(f64, f64)> {
    let lp = LayerPotential::new(f, omega)?;
    lp.side(x, y)?;
    let d = |dx: f64, dy: f64| lp.velocity_unchecked(x + dx, y + dy);
    let e = step;
    let ddx = |c: usize| {
        let pick = |v: (f64, f64)| if c == 0 { v.0 } else { v.1 };
        (8.0 * (pick(d(e, 0.0)) - pick(d(-e, 0.0))) - (pick(d(2.0 * e, 0.0)) - pick(d(-2.0 * e, 0.0)))) / (12.0 * e)
    };
    let ddy = |c: usize| {
        let pick = |v: (f64, f64)| if c == 0 { v.0 } else { v.1 };
        (8.0 * (pick(d(0.0, e)) - pick(d(0.0, -e))) - (pick(d(0.0, 2.0 * e)) - pick(d(0.0, -2.0 * e)))) / (12.0 * e)
    };
    Ok((ddx(0) + ddy(1), ddx(1) - ddy(0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::omega::{rhs_tension, solve_omega, SolveMethod};

    fn gauss(g: &Grid, amp: f64, var: f64) -> GridFunction {
        GridFunction::from_fn(g, |x| amp * (-x * x / var).exp())
    }

    fn darcy_params() -> FluidParams {
        FluidParams {
            mu_minus: 1.5,
            mu_plus: 0.5,
            rho_minus: 2.0,
            rho_plus: 1.0,
            gravity: 1.0,
            permeability: 1.0,
            surface_tension: 0.5,
            far_field_speed: 0.3,
        }
    }

    #[test]
    fn zero_sheet_gives_zero_velocity() {
        let g = Grid::new(10.0, 64).unwrap();
        let f = gauss(&g, 0.5, 1.0);
        let z = GridFunction::zeros(&g);
        let s = biot_savart(&f, &z, &[(0.0, 2.0), (1.0, -3.0)]).unwrap();
        assert!(s.iter().all(|p| p.velocity == (0.0, 0.0) && p.pressure.is_none()));
        assert_eq!(s[0].side, Side::Above);
        assert_eq!(s[1].side, Side::Below);
        for side in [Side::Above, Side::Below, Side::OnInterface] {
            let (v1, v2) = trace_velocity(&f, &z, side).unwrap();
            assert_eq!(v1.max_abs() + v2.max_abs(), 0.0);
        }
    }

    #[test]
    fn guard_band_rejects_close_points() {
        let g = Grid::new(10.0, 128).unwrap();
        let f = gauss(&g, 0.5, 1.0);
        let w = gauss(&g, 1.0, 2.0);
        let h = g.spacing();
        let lp = LayerPotential::new(&f, &w).unwrap();
        let y0 = lp.height(0.3);
        assert!(matches!(lp.velocity(0.3, y0 + h), Err(Error::PointTooClose { .. })));
        assert!(matches!(lp.velocity(0.3, y0 - 1.5 * h), Err(Error::PointTooClose { .. })));
        assert!(lp.velocity(0.3, y0 + 2.0 * h).is_ok());
        assert_eq!(lp.side(0.3, y0 - 2.0 * h).unwrap(), Side::Below);
    }

    #[test]
    fn traces_jump_by_omega_and_share_the_normal_component() {
        let g = Grid::new(10.0, 256).unwrap();
        let f = GridFunction::from_fn(&g, |x| 0.3 * (-(x - 0.5) * (x - 0.5)).exp());
        let w = GridFunction::from_fn(&g, |x| x * (-x * x).exp());
        let fp = spectral_derivative(&f, 1).unwrap();
        let up = trace_velocity(&f, &w, Side::Above).unwrap();
        let down = trace_velocity(&f, &w, Side::Below).unwrap();
        let nt = normal_trace(&f, &w).unwrap();
        for j in 0..g.len() {
            let d = fp.values()[j];
            let tang = |v: &(GridFunction, GridFunction)| v.0.values()[j] + d * v.1.values()[j];
            let norm = |v: &(GridFunction, GridFunction)| -d * v.0.values()[j] + v.1.values()[j];
            assert!((tang(&down) - tang(&up) - w.values()[j]).abs() <= 1e-12);
            assert!((norm(&up) - nt.values()[j]).abs() <= 1e-12);
            assert!((norm(&down) - nt.values()[j]).abs() <= 1e-12);
        }
    }

    #[test]
    fn off_interface_field_is_divergence_and_curl_free() {
        let g = Grid::new(10.0, 256).unwrap();
        let f = gauss(&g, 0.4, 1.0);
        let w = gauss(&g, 1.0, 2.0);
        let step = 0.25 * g.spacing();
        for &(x, y) in &[(0.0, 1.2), (0.7, -0.8), (-2.0, 0.6), (3.0, -2.5)] {
            let (v1, v2) = LayerPotential::new(&f, &w).unwrap().velocity(x, y).unwrap();
            let (div, curl) = div_curl(&f, &w, x, y, step).unwrap();
            let scale = v1.abs().max(v2.abs());
            assert!(div.abs() <= 1e-6 * scale, "div {div} at ({x}, {y})");
            assert!(curl.abs() <= 1e-6 * scale, "curl {curl} at ({x}, {y})");
        }
    }

    #[test]
    fn far_field_decays_like_one_over_r() {
        let g = Grid::new(10.0, 256).unwrap();
        let f = gauss(&g, 0.4, 1.0);
        let w = gauss(&g, 1.0, 1.0);
        let p = far_field_profile(&f, &w, 0.0, &[20.0, 40.0, 80.0]).unwrap();
        let (lo, hi) = (p.iter().cloned().fold(f64::MAX, f64::min), p.iter().cloned().fold(0.0, f64::max));
        assert!(lo > 0.0 && hi <= 2.0 * lo, "{p:?}");
    }

    #[test]
    fn flat_rellich_residual_vanishes() {
        let g = Grid::new(20.0, 512).unwrap();
        let z = GridFunction::zeros(&g);
        let w = GridFunction::from_fn(&g, |x| x * (-x * x).exp());
        let (p, m) = rellich_residual(&z, &w).unwrap();
        assert!(p.abs() <= 1e-10 && m.abs() <= 1e-10, "{p} {m}");
    }

    #[test]
    fn hydrostatic_pressure_without_flow() {
        let g = Grid::new(10.0, 64).unwrap();
        let z = GridFunction::zeros(&g);
        let mut p = darcy_params();
        p.far_field_speed = 0.0;
        let pts = [(0.0, 1.0), (2.0, -1.5), (-1.0, 3.0)];
        let s = reconstruct_pressure(&z, &z, &p, &pts, &PressureOptions::default()).unwrap();
        for (sample, &(_, y)) in s.iter().zip(&pts) {
            let rho = if y > 0.0 { p.rho_plus } else { p.rho_minus };
            assert!((sample.pressure.unwrap() + rho * p.gravity * y).abs() < 1e-14);
        }
    }

    #[test]
    fn anchor_inside_the_interface_region_is_rejected() {
        let g = Grid::new(10.0, 64).unwrap();
        let f = gauss(&g, 1.0, 1.0);
        let opts = PressureOptions {
            anchor: Some(0.5),
            ..PressureOptions::default()
        };
        let r = PressureField::new(&f, &f, &darcy_params(), &opts);
        assert!(matches!(r, Err(Error::PathCrossesInterface { .. })));
    }

    #[test]
    fn pressure_satisfies_darcy_and_the_dynamic_condition() {
        let p = darcy_params();
        let c = p.derive_constants().unwrap();
        let mut worst_jump = Vec::new();
        for &n in &[128usize, 256] {
            let g = Grid::new(10.0, n).unwrap();
            let f = gauss(&g, 0.4, 1.0);
            let w = solve_omega(&f, &rhs_tension(&f, &f, &c).unwrap(), &c, SolveMethod::Direct)
                .unwrap()
                .omega;
            let field = PressureField::new(&f, &w, &p, &PressureOptions::default()).unwrap();
            for &(x, y) in &[(0.3, 1.5), (-1.0, -1.0), (2.0, 0.8)] {
                let (r1, r2) = field.darcy_residual(x, y).unwrap();
                assert!(r1.abs().max(r2.abs()) <= 1e-4, "darcy ({x}, {y}) at N={n}: {r1} {r2}");
            }
            let nodes: Vec<usize> = (n / 2 - n / 8..=n / 2 + n / 8).step_by(n / 32).collect();
            worst_jump.push(field.jump_residual(&f, &nodes).iter().fold(0.0f64, |a, r| a.max(r.abs())));
        }
        assert!(worst_jump[1] <= 1e-3, "{worst_jump:?}");
        assert!(worst_jump[1] < worst_jump[0] / 4.0, "{worst_jump:?}");
    }
}
