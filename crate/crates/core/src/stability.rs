//! Rayleigh-Taylor functional, frozen-coefficient symbols and linear
//! dispersion rates about the flat interface.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::kernels::{apply_b, bnm_apply, KernelSpec};
use crate::math;
use crate::omega::{rhs_no_tension, solve_omega, SolveMethod, VortexSheet};
use crate::params::DerivedConstants;
use crate::spectral::spectral_derivative;

/// `a_RT` on the grid and membership of `f` in the parabolic set.
#[derive(Clone, Debug, PartialEq)]
pub struct RtReport {
    pub a_rt: GridFunction,
    pub infimum: f64,
    pub in_o: bool,
    pub tolerance: f64,
    /// Sheet strength of the tension-free problem at `f`.
    pub omega0: VortexSheet,
}

/// Default margin: `1e-10 max(1, |c_rho_mu|)`, never below `1e-12`.
pub fn default_rt_tolerance(c: &DerivedConstants) -> f64 {
    f64::max(1e-10 * f64::max(1.0, c.c_rho_mu.abs()), 1e-12)
}

/// `a_RT = c_rho_mu + (a_mu / pi) B(f)[omega_0]` with `omega_0` the sheet strength
/// of the tension-free problem, using the default tolerance.
pub fn evaluate_rt(f: &GridFunction, c: &DerivedConstants) -> Result<RtReport> {
    evaluate_rt_with(f, c, default_rt_tolerance(c), SolveMethod::Direct)
}

pub fn evaluate_rt_with(
    f: &GridFunction,
    c: &DerivedConstants,
    tolerance: f64,
    method: SolveMethod,
) -> Result<RtReport> {
    let omega0 = solve_omega(f, &rhs_no_tension(f, c), c, method)?;
    let a_rt = rt_functional(f, &omega0.omega, c)?;
    Ok(report(a_rt, tolerance, omega0))
}

pub(crate) fn report(a_rt: GridFunction, tolerance: f64, omega0: VortexSheet) -> RtReport {
    let infimum = a_rt.min();
    RtReport {
        in_o: infimum > tolerance,
        a_rt,
        infimum,
        tolerance,
        omega0,
    }
}

/// `c_rho_mu + (a_mu / pi) B(f)[omega_0]` for a given `omega_0`.
pub fn rt_functional(f: &GridFunction, omega0: &GridFunction, c: &DerivedConstants) -> Result<GridFunction> {
    if c.a_mu == 0.0 {
        return Ok(GridFunction::constant(f.grid(), c.c_rho_mu));
    }
    let b = apply_b(f, omega0)?;
    Ok(b.map(|v| c.c_rho_mu + c.a_mu / PI * v))
}

/// Coefficients of the principal part linearized at `(f, omega_0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrozenSymbols {
    /// `pi a_RT / (1 + f'^2)`: first-order dissipation (no surface tension).
    pub alpha: GridFunction,
    /// `B_{1,1}(f)[f, omega_0] - a_mu pi omega_0 / (1 + f'^2)`: transport.
    pub beta: GridFunction,
    /// `pi / (1 + f'^2)^{3/2}`: third-order dissipation (surface tension).
    pub gamma3: GridFunction,
}

pub fn frozen_symbols(f: &GridFunction, omega0: &GridFunction, c: &DerivedConstants) -> Result<FrozenSymbols> {
    f.ensure_same_grid(omega0)?;
    let fp = spectral_derivative(f, 1)?;
    let a_rt = rt_functional(f, omega0, c)?;
    let b11 = bnm_apply(&KernelSpec::bnm(&[f], &[f]), omega0)?;
    let n = f.len();
    let mut alpha = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n);
    let mut gamma3 = Vec::with_capacity(n);
    for j in 0..n {
        let s = 1.0 + fp.values()[j] * fp.values()[j];
        alpha.push(PI * a_rt.values()[j] / s);
        beta.push(b11.values()[j] - c.a_mu * PI * omega0.values()[j] / s);
        gamma3.push(PI / (s * math::sqrt(s)));
    }
    Ok(FrozenSymbols {
        alpha: GridFunction::new(f.grid(), alpha)?,
        beta: GridFunction::new(f.grid(), beta)?,
        gamma3: GridFunction::new(f.grid(), gamma3)?,
    })
}

/// Physical-time decay rate of the mode `cos(k x)` about `f = 0`:
/// `(c_rho_mu / 2) k` without surface tension, `(b_mu / 2)(sigma k^3 + Theta k)`
/// with it. Negative values are growth rates.
///
/// In the rescaled time `t' = t / 2 pi` the rates are multiplied by `2 pi`.
pub fn dispersion_rate(k: f64, sigma_on: bool, c: &DerivedConstants) -> Result<f64> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidWavenumber(k));
    }
    if sigma_on {
        Ok(0.5 * c.b_mu * (c.sigma * k * k * k + c.theta * k))
    } else {
        Ok(0.5 * c.c_rho_mu * k)
    }
}
