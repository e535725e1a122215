//! Physical constants of the two-fluid system.
//!
//! Values are read as SI (Pa s, kg/m^3, m/s^2, m^2, N/m, m/s) but no unit
//! checking is done; everything downstream only sees the derived constants.

use alloc::format;

use crate::error::{Error, Result};

/// Viscosities, densities, gravity, permeability, surface tension and the
/// far-field speed. `-` is the lower fluid, `+` the upper one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluidParams {
    pub mu_minus: f64,
    pub mu_plus: f64,
    pub rho_minus: f64,
    pub rho_plus: f64,
    pub gravity: f64,
    pub permeability: f64,
    pub surface_tension: f64,
    pub far_field_speed: f64,
}

/// `a_mu`, `b_mu`, `Theta` and `c_rho_mu`, plus the surface tension they
/// are used with.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivedConstants {
    pub a_mu: f64,
    pub b_mu: f64,
    pub theta: f64,
    pub c_rho_mu: f64,
    pub sigma: f64,
}

impl Default for FluidParams {
    fn default() -> Self {
        FluidParams {
            mu_minus: 1.0,
            mu_plus: 1.0,
            rho_minus: 1.0,
            rho_plus: 0.0,
            gravity: 1.0,
            permeability: 1.0,
            surface_tension: 0.0,
            far_field_speed: 0.0,
        }
    }
}

impl FluidParams {
    /// Parameters with `b_mu = 1`, the given Atwood number and `Theta`, and
    /// surface tension `sigma` (use 1 for the normalized tension case).
    ///
    /// Viscosities are `1 + a` and `1 - a`, permeability 1, densities
    /// `rho_- = Theta`, `rho_+ = 0` at unit gravity when `Theta >= 0` and
    /// swapped otherwise, `V = 0`.
    pub fn normalized(atwood: f64, theta: f64, sigma: f64) -> Result<Self> {
        let (rho_minus, rho_plus) = if theta >= 0.0 { (theta, 0.0) } else { (0.0, -theta) };
        let p = FluidParams {
            mu_minus: 1.0 + atwood,
            mu_plus: 1.0 - atwood,
            rho_minus,
            rho_plus,
            gravity: 1.0,
            permeability: 1.0,
            surface_tension: sigma,
            far_field_speed: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_surface_tension(mut self, sigma: f64) -> Self {
        self.surface_tension = sigma;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("mu_minus", self.mu_minus),
            ("mu_plus", self.mu_plus),
            ("rho_minus", self.rho_minus),
            ("rho_plus", self.rho_plus),
            ("gravity", self.gravity),
            ("permeability", self.permeability),
            ("surface_tension", self.surface_tension),
            ("far_field_speed", self.far_field_speed),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be finite, got {v}")));
            }
        }
        let positive = [
            ("mu_minus", self.mu_minus),
            ("mu_plus", self.mu_plus),
            ("permeability", self.permeability),
        ];
        for (name, v) in positive {
            if v <= 0.0 {
                return Err(Error::InvalidParams(format!("{name} must be positive, got {v}")));
            }
        }
        let nonnegative = [
            ("rho_minus", self.rho_minus),
            ("rho_plus", self.rho_plus),
            ("gravity", self.gravity),
            ("surface_tension", self.surface_tension),
        ];
        for (name, v) in nonnegative {
            if v < 0.0 {
                return Err(Error::InvalidParams(format!("{name} must be nonnegative, got {v}")));
            }
        }
        Ok(())
    }

    pub fn derive_constants(&self) -> Result<DerivedConstants> {
        self.validate()?;
        let mu_sum = self.mu_minus + self.mu_plus;
        let a_mu = (self.mu_minus - self.mu_plus) / mu_sum;
        let b_mu = 2.0 * self.permeability / mu_sum;
        let theta = self.gravity * (self.rho_minus - self.rho_plus)
            + (self.mu_minus - self.mu_plus) * self.far_field_speed / self.permeability;
        let c_rho_mu = b_mu * theta;
        if !(a_mu.abs() < 1.0) {
            return Err(Error::InvalidParams(format!("|a_mu| must be < 1, got {a_mu}")));
        }
        Ok(DerivedConstants {
            a_mu,
            b_mu,
            theta,
            c_rho_mu,
            sigma: self.surface_tension,
        })
    }

    pub fn has_surface_tension(&self) -> bool {
        self.surface_tension > 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn base() -> FluidParams {
        FluidParams::default()
    }

    #[test]
    fn atwood_number() {
        let p = FluidParams { mu_minus: 3.0, mu_plus: 1.0, ..base() };
        assert_eq!(p.derive_constants().unwrap().a_mu, 0.5);
    }

    #[test]
    fn buoyancy_theta() {
        let p = FluidParams {
            gravity: 9.8,
            rho_minus: 2.0,
            rho_plus: 1.0,
            ..base()
        };
        let c = p.derive_constants().unwrap();
        assert!((c.theta - 9.8).abs() < 1e-15);
    }

    #[test]
    fn unit_c_rho_mu() {
        let p = FluidParams {
            rho_minus: 1.0,
            rho_plus: 0.0,
            gravity: 1.0,
            ..base()
        };
        let c = p.derive_constants().unwrap();
        assert_eq!(c.theta, 1.0);
        assert_eq!(c.c_rho_mu, 1.0);
    }

    #[test]
    fn viscous_contribution_to_theta() {
        let p = FluidParams {
            mu_minus: 3.0,
            mu_plus: 1.0,
            rho_minus: 0.0,
            permeability: 2.0,
            far_field_speed: 0.5,
            ..base()
        };
        let c = p.derive_constants().unwrap();
        assert!((c.theta - 0.5).abs() < 1e-15);
        assert!((c.b_mu - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid_configurations() {
        assert!(FluidParams { mu_minus: 0.0, ..base() }.derive_constants().is_err());
        assert!(FluidParams { permeability: 0.0, ..base() }.derive_constants().is_err());
        assert!(FluidParams { surface_tension: -1.0, ..base() }.derive_constants().is_err());
        assert!(FluidParams { gravity: f64::NAN, ..base() }.derive_constants().is_err());
    }

    #[test]
    fn normalized_constructor() {
        let p = FluidParams::normalized(0.5, -2.0, 1.0).unwrap();
        let c = p.derive_constants().unwrap();
        assert!((c.a_mu - 0.5).abs() < 1e-15);
        assert_eq!(c.b_mu, 1.0);
        assert_eq!(c.theta, -2.0);
        assert_eq!(c.sigma, 1.0);
        assert!(FluidParams::normalized(1.0, 0.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn atwood_number_stays_in_open_unit_interval(mm in 1e-6f64..1e6, mp in 1e-6f64..1e6) {
            let c = FluidParams { mu_minus: mm, mu_plus: mp, ..base() }.derive_constants().unwrap();
            prop_assert!(c.a_mu > -1.0 && c.a_mu < 1.0);
        }

        #[test]
        fn viscosity_scaling(mm in 0.01f64..100.0, mp in 0.01f64..100.0, lambda in 0.1f64..10.0) {
            let p = FluidParams { mu_minus: mm, mu_plus: mp, ..base() };
            let q = FluidParams { mu_minus: lambda * mm, mu_plus: lambda * mp, ..p };
            let (c, d) = (p.derive_constants().unwrap(), q.derive_constants().unwrap());
            prop_assert!((c.a_mu - d.a_mu).abs() < 1e-14);
            prop_assert!((c.b_mu / lambda - d.b_mu).abs() <= 1e-14 * c.b_mu);
        }

        #[test]
        fn equal_densities_and_no_viscous_drive_give_zero_theta(
            rho in 0.0f64..10.0, mm in 0.1f64..10.0, mp in 0.1f64..10.0, v in -5.0f64..5.0, equal_mu in any::<bool>()
        ) {
            let (mp, v) = if equal_mu { (mm, v) } else { (mp, 0.0) };
            let p = FluidParams { rho_minus: rho, rho_plus: rho, mu_minus: mm, mu_plus: mp, far_field_speed: v, ..base() };
            let c = p.derive_constants().unwrap();
            prop_assert_eq!(c.theta, 0.0);
            prop_assert_eq!(c.c_rho_mu, 0.0);
        }
    }
}
