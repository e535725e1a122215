//! Uniform grid over the truncated line `[-L, L)` and real samples on it.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::fft::FftPlan;
use crate::math;

/// Fraction of nodes (split over both ends) inspected by the decay diagnostic.
pub const BOUNDARY_FRACTION: f64 = 0.05;

/// Default threshold for [`GridFunction::check_decay`].
pub const DEFAULT_DECAY_THRESHOLD: f64 = 1e-8;

/// Nodes `x_j = -L + j h`, `h = 2L / N`, `N` even and at least 16.
///
/// The grid carries a shared FFT plan so that every Fourier multiplier on it
/// reuses the same twiddles.
#[derive(Clone)]
pub struct Grid {
    half_length: f64,
    n: usize,
    plan: Arc<FftPlan>,
}

impl Grid {
    pub fn new(half_length: f64, n_points: usize) -> Result<Self> {
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "L must be positive and finite, got {half_length}"
            )));
        }
        if !n_points.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("N must be even, got {n_points}")));
        }
        if n_points < 16 {
            return Err(Error::InvalidGrid(format!("N must be at least 16, got {n_points}")));
        }
        Ok(Grid {
            half_length,
            n: n_points,
            plan: Arc::new(FftPlan::new(n_points)),
        })
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Grid spacing `2L / N`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_length / self.n as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        -self.half_length + j as f64 * self.spacing()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.node(j))
    }

    /// Signed wavenumber `m pi / L` of DFT bin `m`. The Nyquist bin `N/2`
    /// gets the positive value.
    pub fn wavenumber(&self, m: usize) -> f64 {
        let n = self.n as isize;
        let signed = if (m as isize) <= n / 2 { m as isize } else { m as isize - n };
        signed as f64 * PI / self.half_length
    }

    pub fn nyquist(&self) -> usize {
        self.n / 2
    }

    /// Bin index of the resolved wavenumber `k`, if `k` is a grid mode.
    pub fn mode_of(&self, k: f64) -> Option<usize> {
        let m = k * self.half_length / PI;
        let rounded = libm::round(m);
        if (m - rounded).abs() > 1e-9 || rounded < 0.0 || rounded as usize > self.n / 2 {
            return None;
        }
        Some(rounded as usize)
    }

    pub(crate) fn plan(&self) -> &FftPlan {
        &self.plan
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.n == other.n && self.half_length == other.half_length
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("half_length", &self.half_length)
            .field("n", &self.n)
            .finish()
    }
}

/// Real samples on a [`Grid`]. All values are finite.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("grid function samples"));
        }
        Ok(GridFunction {
            grid: grid.clone(),
            values,
        })
    }

    pub fn zeros(grid: &Grid) -> Self {
        GridFunction {
            grid: grid.clone(),
            values: alloc::vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: &Grid, c: f64) -> Self {
        GridFunction {
            grid: grid.clone(),
            values: alloc::vec![c; grid.len()],
        }
    }

    /// Samples `u(x_j)`. Panics if `u` returns a non-finite value.
    pub fn from_fn(grid: &Grid, u: impl Fn(f64) -> f64) -> Self {
        let values: Vec<f64> = grid.nodes().map(u).collect();
        assert!(
            values.iter().all(|v| v.is_finite()),
            "sampled function is not finite"
        );
        GridFunction {
            grid: grid.clone(),
            values,
        }
    }

    // Internal constructor for values produced by finite arithmetic.
    pub(crate) fn from_raw(grid: &Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        GridFunction {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn ensure_finite(self, what: &'static str) -> Result<Self> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(Error::NonFinite(what))
        }
    }

    pub fn ensure_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn map(&self, op: impl Fn(f64) -> f64) -> Self {
        GridFunction::from_raw(&self.grid, self.values.iter().map(|&v| op(v)).collect())
    }

    /// Pointwise combination; the caller guarantees matching grids.
    pub fn zip_map(&self, other: &GridFunction, op: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert!(self.grid.same_as(&other.grid));
        GridFunction::from_raw(
            &self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        )
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// Discrete inner product `h sum u_j v_j`.
    pub fn dot(&self, other: &GridFunction) -> f64 {
        self.grid.spacing() * self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>()
    }

    /// Discrete `L2` norm `(h sum u_j^2)^(1/2)`.
    pub fn l2_norm(&self) -> f64 {
        math::sqrt(self.dot(self))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| f64::max(m, v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest `|u|` over the outermost 5% of nodes (half at each end).
    pub fn boundary_decay(&self) -> f64 {
        let n = self.values.len();
        let per_side = (math::ceil(BOUNDARY_FRACTION * n as f64 / 2.0) as usize).max(1);
        self.values[..per_side]
            .iter()
            .chain(&self.values[n - per_side..])
            .fold(0.0, |m, v| f64::max(m, v.abs()))
    }

    pub fn check_decay(&self, threshold: f64) -> Result<()> {
        let max_boundary = self.boundary_decay();
        if max_boundary > threshold {
            Err(Error::DecayCheck {
                max_boundary,
                threshold,
            })
        } else {
            Ok(())
        }
    }
}

impl Add for &GridFunction {
    type Output = GridFunction;
    fn add(self, rhs: &GridFunction) -> GridFunction {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl Sub for &GridFunction {
    type Output = GridFunction;
    fn sub(self, rhs: &GridFunction) -> GridFunction {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl Mul for &GridFunction {
    type Output = GridFunction;
    fn mul(self, rhs: &GridFunction) -> GridFunction {
        self.zip_map(rhs, |a, b| a * b)
    }
}

impl Mul<&GridFunction> for f64 {
    type Output = GridFunction;
    fn mul(self, rhs: &GridFunction) -> GridFunction {
        rhs.scale(self)
    }
}

impl Neg for &GridFunction {
    type Output = GridFunction;
    fn neg(self) -> GridFunction {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_and_small_grids() {
        assert!(matches!(Grid::new(1.0, 33), Err(Error::InvalidGrid(m)) if m.contains("N must be even")));
        assert!(Grid::new(1.0, 8).is_err());
        assert!(Grid::new(0.0, 16).is_err());
        assert!(Grid::new(f64::NAN, 16).is_err());
    }

    #[test]
    fn nodes_are_uniform_and_offset_symmetric() {
        let g = Grid::new(5.0, 20).unwrap();
        assert_eq!(g.spacing(), 0.5);
        assert_eq!(g.node(0), -5.0);
        assert_eq!(g.node(10), 0.0);
        let xs: Vec<f64> = g.nodes().collect();
        assert!(xs.windows(2).all(|w| w[1] > w[0]));
        // x_{N/2 + j} = -x_{N/2 - j}
        for j in 1..10 {
            assert!((xs[10 + j] + xs[10 - j]).abs() < 1e-14);
        }
    }

    #[test]
    fn wavenumbers_follow_dft_ordering() {
        let g = Grid::new(PI, 16).unwrap();
        assert_eq!(g.wavenumber(0), 0.0);
        assert!((g.wavenumber(3) - 3.0).abs() < 1e-14);
        assert!((g.wavenumber(15) + 1.0).abs() < 1e-14);
        assert!((g.wavenumber(8) - 8.0).abs() < 1e-14);
        assert_eq!(g.mode_of(3.0), Some(3));
        assert_eq!(g.mode_of(2.5), None);
    }

    #[test]
    fn rejects_non_finite_samples() {
        let g = Grid::new(1.0, 16).unwrap();
        let mut v = alloc::vec![0.0; 16];
        v[3] = f64::INFINITY;
        assert_eq!(GridFunction::new(&g, v), Err(Error::NonFinite("grid function samples")));
        assert!(matches!(
            GridFunction::new(&g, alloc::vec![0.0; 4]),
            Err(Error::LengthMismatch { expected: 16, got: 4 })
        ));
    }

    #[test]
    fn decay_diagnostic_inspects_outer_nodes() {
        let g = Grid::new(20.0, 256).unwrap();
        let gauss = GridFunction::from_fn(&g, |x| (-x * x).exp());
        assert!(gauss.boundary_decay() < 1e-100);
        assert!(gauss.check_decay(DEFAULT_DECAY_THRESHOLD).is_ok());
        let flat = GridFunction::constant(&g, 0.5);
        assert_eq!(flat.boundary_decay(), 0.5);
        assert!(matches!(flat.check_decay(1e-3), Err(Error::DecayCheck { .. })));
    }
}
