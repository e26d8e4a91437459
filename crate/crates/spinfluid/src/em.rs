//! External electromagnetic data shared by both solvers.
//!
//! Three regimes are supported on the periodic box:
//!   (i)  A = 0 with a periodic scalar potential Phi and B = 0;
//!   (ii) a spatially uniform vector potential A (enters the kinetic term as
//!        a wavenumber shift, B = curl A = 0);
//!   (iii) "Zeeman test mode": A = 0 and a prescribed B that enters only the
//!        magnetic-moment terms. A periodic box admits no vector potential
//!        for a nonzero mean B, so in this mode the curl of the kinetic
//!        momentum vanishes and the u x B Lorentz term is dropped in both
//!        solvers; precession and magnetic-moment-gradient forces are kept.

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField3};
use crate::grid::Grid;
use crate::spectral::SpectralOps;

#[derive(Debug, Clone, PartialEq, Default)]
pub enum AMode {
    #[default]
    Zero,
    /// Spatially uniform, constant-in-time vector potential.
    Uniform([f64; 3]),
}

#[derive(Debug, Clone, Default)]
pub struct FieldConfig {
    pub phi: Option<ScalarField>,
    pub a_mode: AMode,
    pub b_field: Option<VectorField3>,
    pub lorentz_coupling: bool,
    pub zeeman_test_mode: bool,
}

impl FieldConfig {
    /// Free evolution: no potentials, no fields.
    pub fn free() -> Self {
        FieldConfig::default()
    }

    pub fn with_phi(phi: ScalarField) -> Self {
        FieldConfig {
            phi: Some(phi),
            ..Default::default()
        }
    }

    /// Prescribed B in Zeeman test mode (A = 0, no Lorentz u x B term).
    pub fn zeeman(b: VectorField3) -> Self {
        FieldConfig {
            b_field: Some(b),
            zeeman_test_mode: true,
            ..Default::default()
        }
    }

    /// Uniform B0 along z in Zeeman test mode.
    pub fn zeeman_uniform(grid: &Grid, b0: [f64; 3]) -> Self {
        Self::zeeman(VectorField3::constant(grid, b0))
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        if let Some(phi) = &self.phi {
            if phi.grid != *grid {
                return Err(Error::GridMismatch("phi", "grid"));
            }
            phi.check_finite("phi")?;
        }
        if let Some(b) = &self.b_field {
            if b.grid != *grid {
                return Err(Error::GridMismatch("b_field", "grid"));
            }
            b.check_finite("b_field")?;
        }
        let has_b = self.b_field.as_ref().map(|b| b.max_abs() > 0.0).unwrap_or(false);
        match self.a_mode {
            AMode::Zero => {
                if has_b && !self.zeeman_test_mode {
                    return Err(Error::FieldConfig(
                        "prescribed B with A = 0 requires zeeman_test_mode \
                         (a periodic box admits no vector potential for it)"
                            .into(),
                    ));
                }
                if self.lorentz_coupling && self.zeeman_test_mode {
                    return Err(Error::FieldConfig(
                        "zeeman_test_mode drops the u x B term; lorentz_coupling must be off"
                            .into(),
                    ));
                }
            }
            AMode::Uniform(_) => {
                if has_b {
                    return Err(Error::FieldConfig(
                        "uniform A has curl A = 0; a prescribed B alongside it is not \
                         a consistent regime"
                            .into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn uniform_a(&self) -> [f64; 3] {
        match self.a_mode {
            AMode::Zero => [0.0; 3],
            AMode::Uniform(a) => a,
        }
    }

    /// Electric field E = -grad(Phi) (A is constant in time).
    pub fn e_field(&self, ops: &SpectralOps) -> Option<VectorField3> {
        self.phi.as_ref().map(|phi| {
            let mut e = ops.grad(phi);
            e.scale(-1.0);
            e
        })
    }

    /// Whether the u x B Lorentz force is active.
    pub fn lorentz_active(&self) -> bool {
        self.lorentz_coupling && !self.zeeman_test_mode && self.b_field.is_some()
    }
}
