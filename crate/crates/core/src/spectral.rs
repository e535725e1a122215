//! Fourier multipliers on the periodized grid: derivatives, the Hilbert
//! transform, quadrature and discrete Sobolev norms.
//!
//! The DFT is unnormalized forward, `U_m = sum_j u_j e^{-2 pi i jm/N}`, and the
//! inverse carries `1/N`. Mode `m` has wavenumber `xi_m = m pi / L` with the
//! signed DFT ordering of [`Grid::wavenumber`].

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::math;

pub(crate) fn forward(u: &GridFunction) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = u.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    u.grid().plan().forward(&mut buf);
    buf
}

pub(crate) fn inverse_real(grid: &Grid, mut buf: Vec<Complex64>) -> GridFunction {
    grid.plan().inverse(&mut buf);
    GridFunction::from_raw(grid, buf.into_iter().map(|c| c.re).collect())
}

/// Applies the multiplier `symbol(m, xi_m)` modewise.
pub fn apply_multiplier(u: &GridFunction, symbol: impl Fn(usize, f64) -> Complex64) -> GridFunction {
    let grid = u.grid();
    let mut spec = forward(u);
    for (m, c) in spec.iter_mut().enumerate() {
        *c *= symbol(m, grid.wavenumber(m));
    }
    inverse_real(grid, spec)
}

/// `d^order u / dx^order` for `order` in 1..=3. Odd orders drop the Nyquist mode.
pub fn spectral_derivative(u: &GridFunction, order: u32) -> Result<GridFunction> {
    if !(1..=3).contains(&order) {
        return Err(Error::InvalidOrder(order));
    }
    let nyq = u.grid().nyquist();
    let out = apply_multiplier(u, |m, xi| {
        if m == nyq && order % 2 == 1 {
            return Complex64::new(0.0, 0.0);
        }
        let ik = Complex64::new(0.0, xi);
        ik.powu(order)
    });
    out.ensure_finite("spectral derivative")
}

/// First and second derivatives, sharing one forward transform.
pub fn derivatives12(u: &GridFunction) -> (GridFunction, GridFunction) {
    let grid = u.grid();
    let nyq = grid.nyquist();
    let spec = forward(u);
    let d1: Vec<Complex64> = spec
        .iter()
        .enumerate()
        .map(|(m, c)| {
            if m == nyq {
                Complex64::new(0.0, 0.0)
            } else {
                c * Complex64::new(0.0, grid.wavenumber(m))
            }
        })
        .collect();
    let d2: Vec<Complex64> = spec
        .iter()
        .enumerate()
        .map(|(m, c)| {
            let xi = grid.wavenumber(m);
            c * (-xi * xi)
        })
        .collect();
    (inverse_real(grid, d1), inverse_real(grid, d2))
}

/// Multiplier `-i sgn(xi)`; the zero and Nyquist modes map to 0.
pub fn hilbert_transform(u: &GridFunction) -> GridFunction {
    let nyq = u.grid().nyquist();
    apply_multiplier(u, |m, xi| {
        if m == 0 || m == nyq {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, -xi.signum())
        }
    })
}

/// Rectangle rule `h sum u_j`.
pub fn integrate(u: &GridFunction) -> f64 {
    u.grid().spacing() * u.values().iter().sum::<f64>()
}

/// `(h/N sum_m (1 + xi_m^2)^s |U_m|^2)^(1/2)`; for `s = 0` this is the
/// discrete `L2` norm.
pub fn sobolev_norm(u: &GridFunction, s: f64) -> f64 {
    let grid = u.grid();
    let spec = forward(u);
    let sum: f64 = spec
        .iter()
        .enumerate()
        .map(|(m, c)| {
            let xi = grid.wavenumber(m);
            math::powf(1.0 + xi * xi, s) * c.norm_sqr()
        })
        .sum();
    math::sqrt(grid.spacing() / grid.len() as f64 * sum)
}

/// Trigonometric interpolant of the samples, evaluated at arbitrary points.
///
/// The Nyquist mode is split evenly between `+xi` and `-xi`, so the
/// interpolant is real.
pub struct Interpolant {
    half_length: f64,
    coeffs: Vec<(f64, Complex64)>,
}

impl Interpolant {
    pub fn new(u: &GridFunction) -> Self {
        let grid = u.grid();
        let n = grid.len();
        let nyq = grid.nyquist();
        let spec = forward(u);
        let coeffs = spec
            .iter()
            .enumerate()
            .filter(|&(m, _)| m <= nyq)
            .map(|(m, c)| {
                let weight = if m == 0 || m == nyq { 1.0 } else { 2.0 };
                (grid.wavenumber(m), c * (weight / n as f64))
            })
            .collect();
        Interpolant {
            half_length: grid.half_length(),
            coeffs,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let t = x + self.half_length;
        self.coeffs
            .iter()
            .map(|(xi, c)| {
                let phase = xi * t;
                c.re * math::cos(phase) - c.im * math::sin(phase)
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn close(a: &GridFunction, b: &GridFunction) -> f64 {
        (a - b).max_abs()
    }

    #[test]
    fn derivative_rejects_bad_order() {
        let g = Grid::new(1.0, 16).unwrap();
        let u = GridFunction::zeros(&g);
        assert_eq!(spectral_derivative(&u, 0), Err(Error::InvalidOrder(0)));
        assert_eq!(spectral_derivative(&u, 4), Err(Error::InvalidOrder(4)));
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let g = Grid::new(3.0, 64).unwrap();
        let u = GridFunction::constant(&g, 2.5);
        for order in 1..=3 {
            assert!(spectral_derivative(&u, order).unwrap().max_abs() < 1e-13);
        }
    }

    #[test]
    fn derivative_of_resolved_mode_is_exact() {
        let l = 4.0;
        let g = Grid::new(l, 32).unwrap();
        let u = GridFunction::from_fn(&g, |x| (PI * x / l).sin());
        let du = GridFunction::from_fn(&g, |x| PI / l * (PI * x / l).cos());
        assert!(close(&spectral_derivative(&u, 1).unwrap(), &du) < 1e-14);
        let d3 = GridFunction::from_fn(&g, |x| -(PI / l).powi(3) * (PI * x / l).cos());
        assert!(close(&spectral_derivative(&u, 3).unwrap(), &d3) < 1e-11);
    }

    #[test]
    fn gaussian_second_derivative() {
        let g = Grid::new(20.0, 512).unwrap();
        let u = GridFunction::from_fn(&g, |x| (-x * x).exp());
        let exact = GridFunction::from_fn(&g, |x| (4.0 * x * x - 2.0) * (-x * x).exp());
        assert!(close(&spectral_derivative(&u, 2).unwrap(), &exact) <= 1e-8);
        let (d1, d2) = derivatives12(&u);
        assert!(close(&d2, &exact) <= 1e-8);
        let exact1 = GridFunction::from_fn(&g, |x| -2.0 * x * (-x * x).exp());
        assert!(close(&d1, &exact1) <= 1e-8);
    }

    #[test]
    fn hilbert_of_cosine_is_sine() {
        let l = 5.0;
        let g = Grid::new(l, 64).unwrap();
        let k = 3.0 * PI / l;
        let u = GridFunction::from_fn(&g, |x| (k * x).cos());
        let v = GridFunction::from_fn(&g, |x| (k * x).sin());
        assert!(close(&hilbert_transform(&u), &v) < 1e-13);
        assert!(hilbert_transform(&GridFunction::zeros(&g)).max_abs() == 0.0);
    }

    #[test]
    fn hilbert_squared_is_minus_identity_on_mean_zero_data() {
        let g = Grid::new(20.0, 256).unwrap();
        let u = GridFunction::from_fn(&g, |x| x * (-x * x).exp());
        let hh = hilbert_transform(&hilbert_transform(&u));
        assert!(close(&hh, &-&u) <= 1e-12);
    }

    #[test]
    fn gaussian_integral() {
        let g = Grid::new(20.0, 512).unwrap();
        let u = GridFunction::from_fn(&g, |x| (-x * x).exp());
        assert!((integrate(&u) - PI.sqrt()).abs() < 1e-10);
        let odd = GridFunction::from_fn(&g, |x| x.powi(3) * (-x * x).exp());
        assert!(integrate(&odd).abs() < 1e-12);
    }

    #[test]
    fn sobolev_norm_of_single_mode() {
        let l = 2.0;
        let g = Grid::new(l, 64).unwrap();
        let k = 5.0 * PI / l;
        let u = GridFunction::from_fn(&g, |x| (k * x).cos());
        let l2 = u.l2_norm();
        assert!((sobolev_norm(&u, 0.0) - l2).abs() <= 1e-12 * l2);
        assert!((l2 - l.sqrt()).abs() < 1e-12);
        let s = 1.5;
        let expected = (l * (1.0 + k * k).powf(s)).sqrt();
        assert!((sobolev_norm(&u, s) - expected).abs() <= 1e-11 * expected);
    }

    #[test]
    fn interpolant_reproduces_nodes_and_modes() {
        let l = 3.0;
        let g = Grid::new(l, 32).unwrap();
        let k = 2.0 * PI / l;
        let u = GridFunction::from_fn(&g, |x| (k * x).sin() + 0.5);
        let it = Interpolant::new(&u);
        for (j, x) in g.nodes().enumerate() {
            assert!((it.eval(x) - u.values()[j]).abs() < 1e-13);
        }
        for &x in &[0.123, -2.71, 1.9] {
            assert!((it.eval(x) - ((k * x).sin() + 0.5)).abs() < 1e-13);
        }
    }
}
