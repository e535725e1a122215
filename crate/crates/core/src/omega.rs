//! Right-hand sides of the sheet-strength equation and its solution
//! `(1 + a_mu A(f)) omega = rhs`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::kernels::{a_commutator, KernelSpec, Operator, PvRule};
use crate::linalg::Lu;
use crate::math;
use crate::params::DerivedConstants;
use crate::spectral::{derivatives12, spectral_derivative};

/// Relative residual at which the Neumann iteration stops.
pub const NEUMANN_TOL: f64 = 1e-12;
/// Iteration cap before the Neumann solve falls back to the direct one.
pub const NEUMANN_MAX_ITER: usize = 200;
/// Condition estimates above this are reported as degenerate.
pub const MAX_CONDITION: f64 = 1e12;

/// Requested solution method.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SolveMethod {
    /// Dense LU of `I + a_mu A_h`.
    #[default]
    Direct,
    /// `omega_{k+1} = rhs - a_mu A(f) omega_k` from `omega_0 = rhs`.
    Neumann,
}

/// Method that actually produced a [`VortexSheet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SheetMethod {
    Direct,
    Neumann,
    /// Neumann did not converge and the direct solve was used.
    DirectFallback,
}

/// Sheet strength together with how it was obtained.
#[derive(Clone, Debug, PartialEq)]
pub struct VortexSheet {
    pub omega: GridFunction,
    /// `||(I + a_mu A_h) omega - rhs||_2` from one extra operator application.
    pub residual_norm: f64,
    pub method: SheetMethod,
    /// Neumann iterations performed (0 for a pure direct solve).
    pub iterations: usize,
    /// Condition estimate of the direct system, when one was factored.
    pub condition: Option<f64>,
}

/// `-c_rho_mu f'`.
pub fn rhs_no_tension(f: &GridFunction, c: &DerivedConstants) -> GridFunction {
    let fp = spectral_derivative(f, 1).expect("order 1 is valid");
    fp.scale(-c.c_rho_mu)
}

/// `b_mu [sigma h''' / (1 + f'^2)^{3/2} - 3 sigma f' f'' h'' / (1 + f'^2)^{5/2} - Theta h']`.
pub fn rhs_tension(f: &GridFunction, h: &GridFunction, c: &DerivedConstants) -> Result<GridFunction> {
    f.ensure_same_grid(h)?;
    let (fp, fpp) = derivatives12(f);
    let (hp, hpp) = derivatives12(h);
    let hppp = spectral_derivative(h, 3)?;
    let out: Vec<f64> = (0..f.len())
        .map(|j| {
            let (d1, d2) = (fp.values()[j], fpp.values()[j]);
            let s = 1.0 + d1 * d1;
            let s32 = s * math::sqrt(s);
            c.b_mu
                * (c.sigma * hppp.values()[j] / s32 - 3.0 * c.sigma * d1 * d2 * hpp.values()[j] / (s32 * s)
                    - c.theta * hp.values()[j])
        })
        .collect();
    GridFunction::new(f.grid(), out)
}

fn residual(op: &Operator, a_mu: f64, omega: &GridFunction, rhs: &GridFunction) -> Result<f64> {
    let aw = op.apply(omega)?;
    let r: Vec<f64> = (0..omega.len())
        .map(|j| omega.values()[j] + a_mu * aw.values()[j] - rhs.values()[j])
        .collect();
    Ok(GridFunction::new(omega.grid(), r)?.l2_norm())
}

fn solve_direct(op: &Operator, a_mu: f64, rhs: &GridFunction) -> Result<(GridFunction, f64)> {
    let system = op.matrix().shifted_identity(a_mu);
    let lu = Lu::factor(&system).ok_or(Error::DegenerateOperator {
        condition: f64::INFINITY,
    })?;
    let condition = lu.condition_estimate();
    if !(condition <= MAX_CONDITION) {
        return Err(Error::DegenerateOperator { condition });
    }
    let omega = GridFunction::new(rhs.grid(), lu.solve(rhs.values()))?;
    Ok((omega, condition))
}

/// Solves `(1 + a_mu A(f)) omega = rhs`.
///
/// For `a_mu = 0` the right-hand side is returned unchanged.
pub fn solve_omega(
    f: &GridFunction,
    rhs: &GridFunction,
    c: &DerivedConstants,
    method: SolveMethod,
) -> Result<VortexSheet> {
    f.ensure_same_grid(rhs)?;
    if !rhs.is_finite() {
        return Err(Error::NonFinite("sheet-strength right-hand side"));
    }
    let a_mu = c.a_mu;
    if a_mu == 0.0 {
        return Ok(VortexSheet {
            omega: rhs.clone(),
            residual_norm: 0.0,
            method: match method {
                SolveMethod::Direct => SheetMethod::Direct,
                SolveMethod::Neumann => SheetMethod::Neumann,
            },
            iterations: 0,
            condition: None,
        });
    }
    let op = Operator::new(&KernelSpec::A(f.clone()), PvRule::Corrected)?;
    match method {
        SolveMethod::Direct => {
            let (omega, condition) = solve_direct(&op, a_mu, rhs)?;
            let residual_norm = residual(&op, a_mu, &omega, rhs)?;
            Ok(VortexSheet {
                omega,
                residual_norm,
                method: SheetMethod::Direct,
                iterations: 0,
                condition: Some(condition),
            })
        }
        SolveMethod::Neumann => {
            let scale = rhs.l2_norm();
            let mut omega = rhs.clone();
            for k in 1..=NEUMANN_MAX_ITER {
                let next = rhs - &op.apply(&omega)?.scale(a_mu);
                // next - omega is minus the residual of omega
                let step = (&next - &omega).l2_norm();
                omega = next;
                if !omega.is_finite() {
                    break;
                }
                if step <= NEUMANN_TOL * scale {
                    let residual_norm = residual(&op, a_mu, &omega, rhs)?;
                    return Ok(VortexSheet {
                        omega,
                        residual_norm,
                        method: SheetMethod::Neumann,
                        iterations: k,
                        condition: None,
                    });
                }
            }
            let (omega, condition) = solve_direct(&op, a_mu, rhs)?;
            let residual_norm = residual(&op, a_mu, &omega, rhs)?;
            Ok(VortexSheet {
                omega,
                residual_norm,
                method: SheetMethod::DirectFallback,
                iterations: NEUMANN_MAX_ITER,
                condition: Some(condition),
            })
        }
    }
}

/// `(A(f)[omega])' - A(f)[omega']`, assembled from `B_{n,m}` terms.
pub fn t0_lot(f: &GridFunction, omega: &GridFunction) -> Result<GridFunction> {
    a_commutator(f, omega)
}

/// Splits the tension-driven sheet strength as `omega = omega_1' + omega_2`:
///
/// `(1 + a_mu A) omega_1 = b_mu sigma h'' / (1 + f'^2)^{3/2}`,
/// `(1 + a_mu A) omega_2 = -b_mu Theta h' + a_mu T_lot(f)[omega_1]`,
///
/// where `T_lot(f) = (A(f) .)' - A(f)(.)'`.
pub fn omega_decomposition(
    f: &GridFunction,
    h: &GridFunction,
    c: &DerivedConstants,
    method: SolveMethod,
) -> Result<(GridFunction, GridFunction)> {
    f.ensure_same_grid(h)?;
    let (fp, _) = derivatives12(f);
    let (hp, hpp) = derivatives12(h);
    let g: Vec<f64> = (0..f.len())
        .map(|j| {
            let s = 1.0 + fp.values()[j] * fp.values()[j];
            c.b_mu * c.sigma * hpp.values()[j] / (s * math::sqrt(s))
        })
        .collect();
    let g = GridFunction::new(f.grid(), g)?;
    let omega1 = solve_omega(f, &g, c, method)?.omega;
    let mut rhs2 = hp.scale(-c.b_mu * c.theta);
    if c.a_mu != 0.0 {
        rhs2 = &rhs2 + &t0_lot(f, &omega1)?.scale(c.a_mu);
    }
    let omega2 = solve_omega(f, &rhs2, c, method)?.omega;
    Ok((omega1, omega2))
}

/// Largest observed `||omega||_2 / ||(lambda - A_h) omega||_2` over `samples`.
pub fn resolvent_ratio(f: &GridFunction, lambda: f64, samples: &[GridFunction]) -> Result<f64> {
    let op = Operator::new(&KernelSpec::A(f.clone()), PvRule::Corrected)?;
    let mut worst: f64 = 0.0;
    for w in samples {
        let aw = op.apply(w)?;
        let shifted = &w.scale(lambda) - &aw;
        let denom = shifted.l2_norm();
        if denom > 0.0 {
            worst = worst.max(w.l2_norm() / denom);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::kernels::apply_a;
    use crate::params::FluidParams;

    fn consts(a_mu: f64, theta: f64, sigma: f64) -> DerivedConstants {
        FluidParams::normalized(a_mu, theta, sigma).unwrap().derive_constants().unwrap()
    }

    fn grid() -> Grid {
        Grid::new(10.0, 128).unwrap()
    }

    #[test]
    fn no_tension_rhs() {
        let g = Grid::new(20.0, 512).unwrap();
        let f = GridFunction::from_fn(&g, |x| (-x * x).exp());
        let c = consts(0.0, 1.0, 0.0);
        let expected = GridFunction::from_fn(&g, |x| 2.0 * x * (-x * x).exp());
        assert!((&rhs_no_tension(&f, &c) - &expected).max_abs() < 1e-12);
        assert_eq!(rhs_no_tension(&f, &consts(0.3, 0.0, 0.0)).max_abs(), 0.0);
        assert_eq!(rhs_no_tension(&GridFunction::zeros(&g), &c).max_abs(), 0.0);
    }

    #[test]
    fn tension_rhs_special_cases() {
        let g = grid();
        let f = GridFunction::from_fn(&g, |x| 0.5 * (-x * x).exp());
        let h = GridFunction::from_fn(&g, |x| (-x * x / 2.0).exp());
        let c = consts(0.2, 1.0, 1.0);
        assert_eq!(rhs_tension(&f, &GridFunction::zeros(&g), &c).unwrap().max_abs(), 0.0);
        let flat = rhs_tension(&GridFunction::zeros(&g), &h, &consts(0.0, 0.0, 1.0)).unwrap();
        let hppp = spectral_derivative(&h, 3).unwrap();
        assert!((&flat - &hppp).max_abs() < 1e-13);
    }

    #[test]
    fn tension_rhs_is_derivative_of_curvature_minus_gravity() {
        let g = Grid::new(20.0, 512).unwrap();
        let f = GridFunction::from_fn(&g, |x| (-x * x).exp());
        let c = consts(0.0, 1.0, 1.0);
        // kappa and its derivative from closed forms
        let fp = |x: f64| -2.0 * x * (-x * x).exp();
        let fpp = |x: f64| (4.0 * x * x - 2.0) * (-x * x).exp();
        let fppp = |x: f64| (12.0 * x - 8.0 * x * x * x) * (-x * x).exp();
        let dkappa = GridFunction::from_fn(&g, |x| {
            let s = 1.0 + fp(x) * fp(x);
            fppp(x) / s.powf(1.5) - 3.0 * fp(x) * fpp(x) * fpp(x) / s.powf(2.5)
        });
        let expected = &dkappa - &GridFunction::from_fn(&g, fp);
        let got = rhs_tension(&f, &f, &c).unwrap();
        assert!((&got - &expected).max_abs() < 1e-8);
    }

    #[test]
    fn equal_viscosities_return_rhs_verbatim() {
        let g = grid();
        let f = GridFunction::from_fn(&g, |x| (-x * x).exp());
        let rhs = GridFunction::from_fn(&g, |x| x.sin() * (-x * x).exp());
        for method in [SolveMethod::Direct, SolveMethod::Neumann] {
            let s = solve_omega(&f, &rhs, &consts(0.0, 1.0, 0.0), method).unwrap();
            assert_eq!(s.omega, rhs);
            assert_eq!(s.residual_norm, 0.0);
        }
    }

    #[test]
    fn flat_interface_returns_rhs() {
        let g = grid();
        let rhs = GridFunction::from_fn(&g, |x| x * (-x * x).exp());
        let s = solve_omega(&GridFunction::zeros(&g), &rhs, &consts(0.7, 1.0, 0.0), SolveMethod::Direct).unwrap();
        assert!((&s.omega - &rhs).max_abs() < 1e-15);
    }

    #[test]
    fn direct_and_neumann_agree() {
        let g = grid();
        let f = GridFunction::from_fn(&g, |x| (-x * x).exp());
        for &a in &[0.5, -0.9, 0.9] {
            let c = consts(a, 1.0, 0.0);
            let rhs = rhs_no_tension(&f, &c);
            let d = solve_omega(&f, &rhs, &c, SolveMethod::Direct).unwrap();
            let n = solve_omega(&f, &rhs, &c, SolveMethod::Neumann).unwrap();
            assert!(d.residual_norm <= 1e-10);
            assert!(n.residual_norm <= 1e-10);
            assert!((&d.omega - &n.omega).l2_norm() <= 1e-8);
            // the computed residual is the actual one
            let aw = apply_a(&f, &d.omega).unwrap();
            let r = &(&d.omega + &aw.scale(a)) - &rhs;
            assert!((r.l2_norm() - d.residual_norm).abs() < 1e-14);
        }
    }

    #[test]
    fn solve_is_linear_in_rhs() {
        let g = grid();
        let f = GridFunction::from_fn(&g, |x| 0.8 * (-x * x).exp());
        let c = consts(0.6, 1.0, 0.0);
        let r1 = GridFunction::from_fn(&g, |x| (-x * x).exp());
        let r2 = GridFunction::from_fn(&g, |x| x * (-(x - 1.0) * (x - 1.0)).exp());
        let s = |r: &GridFunction| solve_omega(&f, r, &c, SolveMethod::Direct).unwrap().omega;
        let combo = s(&(&r1.scale(2.0) + &r2.scale(-3.0)));
        let sum = &s(&r1).scale(2.0) + &s(&r2).scale(-3.0);
        assert!((&combo - &sum).max_abs() < 1e-10);
    }

    #[test]
    fn decomposition_on_flat_interface() {
        let g = grid();
        let z = GridFunction::zeros(&g);
        let h = GridFunction::from_fn(&g, |x| (-x * x).exp());
        let c = consts(0.5, 0.0, 1.0);
        let (w1, w2) = omega_decomposition(&z, &h, &c, SolveMethod::Direct).unwrap();
        let hpp = crate::spectral::spectral_derivative(&h, 2).unwrap();
        assert!((&w1 - &hpp).max_abs() < 1e-12);
        assert!(w2.max_abs() < 1e-14);
        let (w1, w2) = omega_decomposition(&z, &z, &c, SolveMethod::Direct).unwrap();
        assert_eq!((w1.max_abs(), w2.max_abs()), (0.0, 0.0));
    }

    #[test]
    fn resolvent_ratio_is_finite_away_from_the_spectrum() {
        let g = grid();
        let f = GridFunction::from_fn(&g, |x| (-x * x).exp());
        let samples: Vec<GridFunction> = (1..6)
            .map(|k| GridFunction::from_fn(&g, |x| (k as f64 * x).cos() * (-x * x / 4.0).exp()))
            .collect();
        for &lambda in &[1.0, -1.0, 2.0, -2.0] {
            let r = resolvent_ratio(&f, lambda, &samples).unwrap();
            assert!(r.is_finite() && r > 0.0);
        }
    }
}
