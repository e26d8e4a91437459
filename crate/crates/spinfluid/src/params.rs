//! Physical parameters and the barotropic pressure law.

use crate::error::{Error, Result};
use crate::field::ScalarField;

/// Barotropic specific-enthalpy law `h(rho)`, with pressure defined through
/// `dP/drho = rho * h''(rho)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum PressureLaw {
    #[default]
    None,
    /// `P = K rho^gamma`, i.e. `h = K gamma rho^(gamma-1) / (gamma-1)` up to
    /// an additive constant; `gamma = 1` is the isothermal case
    /// `h = K log(rho)`.
    Polytropic { gamma: f64, coeff: f64 },
}

impl PressureLaw {
    /// h(rho) such that the internal energy density is rho * h(rho)/rho = h(rho)
    /// in the total-energy functional. Chosen so that h'' = (dP/drho)/rho.
    pub fn h(&self, rho: f64) -> f64 {
        match *self {
            PressureLaw::None => 0.0,
            PressureLaw::Polytropic { gamma, coeff } => {
                if (gamma - 1.0).abs() < 1e-14 {
                    coeff * rho * rho.ln()
                } else {
                    coeff * rho.powf(gamma) / (gamma - 1.0)
                }
            }
        }
    }

    /// h'(rho) = dh/drho; enters the momentum equation as grad(h') = grad(P)/rho.
    pub fn h_prime(&self, rho: f64) -> f64 {
        match *self {
            PressureLaw::None => 0.0,
            PressureLaw::Polytropic { gamma, coeff } => {
                if (gamma - 1.0).abs() < 1e-14 {
                    coeff * (rho.ln() + 1.0)
                } else {
                    coeff * gamma * rho.powf(gamma - 1.0) / (gamma - 1.0)
                }
            }
        }
    }

    /// P(rho), for diagnostics.
    pub fn pressure(&self, rho: f64) -> f64 {
        match *self {
            PressureLaw::None => 0.0,
            PressureLaw::Polytropic { gamma, coeff } => coeff * rho.powf(gamma),
        }
    }
}

/// Physical constants of one species plus model constants.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysParams {
    pub hbar: f64,
    pub mass: f64,
    pub charge: f64,
    /// Precession coupling constant (1 in the spin-1/2 particle analogy).
    pub kappa_s: f64,
    /// Gyromagnetic constant c_g = g * c_s (1 for g ~ 2, c_s = 1/2).
    pub c_g: f64,
    /// Spin magnitude constant (1/2 in the spin-1/2 particle analogy).
    pub c_s: f64,
    pub pressure: PressureLaw,
    /// External scalar potential V(x), if any.
    pub v_ext: Option<ScalarField>,
    /// Density floor as a fraction of the mean density.
    pub rho_floor_factor: f64,
}

impl Default for PhysParams {
    fn default() -> Self {
        PhysParams {
            hbar: 1.0,
            mass: 1.0,
            charge: 1.0,
            kappa_s: 1.0,
            c_g: 1.0,
            c_s: 0.5,
            pressure: PressureLaw::None,
            v_ext: None,
            rho_floor_factor: 1e-12,
        }
    }
}

impl PhysParams {
    pub fn natural() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hbar > 0.0) {
            return Err(Error::Params(format!("hbar must be positive, got {}", self.hbar)));
        }
        if !(self.mass > 0.0) {
            return Err(Error::Params(format!("mass must be positive, got {}", self.mass)));
        }
        if !self.charge.is_finite() {
            return Err(Error::Params("charge must be finite".into()));
        }
        if let PressureLaw::Polytropic { gamma, coeff } = self.pressure {
            if !gamma.is_finite() || !coeff.is_finite() || gamma <= 0.0 {
                return Err(Error::Params(format!(
                    "polytropic law needs gamma > 0 and finite coeff, got gamma={gamma}, K={coeff}"
                )));
            }
        }
        Ok(())
    }

    /// Density floor for a field with the given mean density.
    pub fn rho_floor(&self, mean_rho: f64) -> f64 {
        self.rho_floor_factor * mean_rho
    }
}
