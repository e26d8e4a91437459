//! Energy functional, functional derivatives, Poisson-operator right-hand
//! side, and the momentum/spin-density change of variables used for
//! structural verification of the fluid-with-spin equations.

use crate::em::FieldConfig;
use crate::error::{Error, Result};
use crate::field::{cross3, ScalarField, VectorField3};
use crate::hydro::HydroRhs;
use crate::madelung::HydroState;
use crate::params::{PhysParams, PressureLaw};
use crate::spectral::SpectralOps;

/// Total energy of the fluid,
///
/// `H = int rho [ m u^2/2 + q Phi + V + h(rho)/rho
///                + (c_g^2 hbar^2 / 8m)(|grad log rho|^2 + |grad s|^2)
///                - (c_g kappa_s q hbar / 2m) B . s ] dV`.
pub fn total_energy(
    ops: &SpectralOps,
    state: &HydroState,
    fields: &FieldConfig,
    params: &PhysParams,
) -> f64 {
    let grid = ops.grid().clone();
    let n = grid.len();
    let (hbar, m, q) = (params.hbar, params.mass, params.charge);
    let (cg, ks) = (params.c_g, params.kappa_s);
    let grad_rho = ops.grad(&state.rho);
    let jac_s = ops.jacobian(&state.s);
    let mut density = ScalarField::zeros(&grid);
    for i in 0..n {
        let rho = state.rho.data[i];
        let u = state.u.at(i);
        let mut e = 0.5 * m * (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
        if let Some(phi) = &fields.phi {
            e += q * phi.data[i];
        }
        if let Some(v) = &params.v_ext {
            e += v.data[i];
        }
        let mut grads = 0.0;
        for c in 0..3 {
            let gl = grad_rho.comps[c][i] / rho;
            grads += gl * gl;
            for k in 0..3 {
                let g = jac_s[k].comps[c][i];
                grads += g * g;
            }
        }
        e += cg * cg * hbar * hbar / (8.0 * m) * grads;
        if let Some(b) = &fields.b_field {
            let bv = b.at(i);
            let s = state.s.at(i);
            e -= cg * ks * q * hbar / (2.0 * m) * (bv[0] * s[0] + bv[1] * s[1] + bv[2] * s[2]);
        }
        density.data[i] = rho * e + params.pressure.h(rho);
    }
    ops.integrate(&density)
}

/// Functional derivatives of the total energy:
///
/// dH/drho = m u^2/2 + q Phi + V + h'(rho) + c_g^2 Q
///           + (c_g^2 hbar^2/8m)|grad s|^2 - (c_g kappa_s q hbar/2m) B.s
/// dH/du   = m rho u
/// dH/ds_k = -(c_g^2 hbar^2/4m)(grad rho . grad s_k + rho lap s_k)
///           - (c_g kappa_s q hbar/2m) rho B^k
#[derive(Debug, Clone)]
pub struct FunctionalDerivs {
    pub d_rho: ScalarField,
    pub d_u: VectorField3,
    pub d_s: VectorField3,
}

pub fn functional_derivatives(
    ops: &SpectralOps,
    state: &HydroState,
    fields: &FieldConfig,
    params: &PhysParams,
) -> FunctionalDerivs {
    let grid = ops.grid().clone();
    let n = grid.len();
    let (hbar, m, q) = (params.hbar, params.mass, params.charge);
    let (cg, ks) = (params.c_g, params.kappa_s);
    let grad_rho = ops.grad(&state.rho);
    let jac_s = ops.jacobian(&state.s);
    let lap_s = ops.vector_lap(&state.s);
    let sqrt_rho = state.rho.map(f64::sqrt);
    let lap_sqrt = ops.lap(&sqrt_rho);

    let mut d_rho = ScalarField::zeros(&grid);
    let mut d_u = VectorField3::zeros(&grid);
    let mut d_s = VectorField3::zeros(&grid);
    for i in 0..n {
        let rho = state.rho.data[i];
        let u = state.u.at(i);
        let mut v = 0.5 * m * (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
        if let Some(phi) = &fields.phi {
            v += q * phi.data[i];
        }
        if let Some(vx) = &params.v_ext {
            v += vx.data[i];
        }
        if params.pressure != PressureLaw::None {
            v += params.pressure.h_prime(rho);
        }
        // c_g^2 Q
        v += -cg * cg * hbar * hbar / (2.0 * m) * lap_sqrt.data[i] / sqrt_rho.data[i];
        let mut grads_sq = 0.0;
        for c in 0..3 {
            for k in 0..3 {
                let g = jac_s[k].comps[c][i];
                grads_sq += g * g;
            }
        }
        v += cg * cg * hbar * hbar / (8.0 * m) * grads_sq;
        let bv = fields.b_field.as_ref().map(|b| b.at(i)).unwrap_or([0.0; 3]);
        if fields.b_field.is_some() {
            let s = state.s.at(i);
            v -= cg * ks * q * hbar / (2.0 * m) * (bv[0] * s[0] + bv[1] * s[1] + bv[2] * s[2]);
        }
        d_rho.data[i] = v;
        for c in 0..3 {
            d_u.comps[c][i] = m * rho * u[c];
        }
        for k in 0..3 {
            let mut adv = 0.0;
            for c in 0..3 {
                adv += grad_rho.comps[c][i] * jac_s[k].comps[c][i];
            }
            d_s.comps[k][i] = -cg * cg * hbar * hbar / (4.0 * m) * (adv + rho * lap_s.comps[k][i])
                - cg * ks * q * hbar / (2.0 * m) * rho * bv[k];
        }
    }
    FunctionalDerivs { d_rho, d_u, d_s }
}

/// Curl of the canonical velocity `u + qA/m` (uniform A contributes nothing).
fn canonical_curl(ops: &SpectralOps, state: &HydroState) -> VectorField3 {
    ops.curl(&state.u)
}

/// Equations of motion assembled from the Poisson operator acting on the
/// functional derivatives:
///
/// drho/dt = -(1/m) div(dH/du)
/// du/dt   = -(1/m) grad(dH/drho)
///           - (1/m rho)[curl(u + qA/m)] x (dH/du)
///           + (1/m rho) sum_k (dH/ds_k) grad(s_k)
/// ds/dt   = -(1/m rho)(dH/du . grad) s - (2/c_g hbar rho) s x (dH/ds)
pub fn bracket_rhs(
    ops: &SpectralOps,
    state: &HydroState,
    fields: &FieldConfig,
    params: &PhysParams,
) -> HydroRhs {
    let grid = ops.grid().clone();
    let n = grid.len();
    let (hbar, m) = (params.hbar, params.mass);
    let cg = params.c_g;
    let derivs = functional_derivatives(ops, state, fields, params);
    let jac_s = ops.jacobian(&state.s);

    let mut drho = ops.div(&derivs.d_u);
    drho.scale(-1.0 / m);

    let grad_drho = ops.grad(&derivs.d_rho);
    let omega = canonical_curl(ops, state);
    let mut du = VectorField3::zeros(&grid);
    for i in 0..n {
        let rho = state.rho.data[i];
        let w = omega.at(i);
        let fu = derivs.d_u.at(i);
        let wx = cross3(w, fu);
        for j in 0..3 {
            let mut spin_term = 0.0;
            for k in 0..3 {
                spin_term += derivs.d_s.comps[k][i] * jac_s[k].comps[j][i];
            }
            du.comps[j][i] =
                -grad_drho.comps[j][i] / m - wx[j] / (m * rho) + spin_term / (m * rho);
        }
    }

    let mut ds = VectorField3::zeros(&grid);
    for i in 0..n {
        let rho = state.rho.data[i];
        let fu = derivs.d_u.at(i);
        let s = state.s.at(i);
        let fs = derivs.d_s.at(i);
        let sxfs = cross3(s, fs);
        for k in 0..3 {
            let mut adv = 0.0;
            for c in 0..3 {
                adv += fu[c] * jac_s[k].comps[c][i];
            }
            ds.comps[k][i] = -adv / (m * rho) - 2.0 / (cg * hbar * rho) * sxfs[k];
        }
    }

    HydroRhs { drho, du, ds }
}

/// Momentum/spin-density variables `M = rho (m u + q A)`,
/// `Sigma = (c_g hbar / 2) rho s`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiePoissonState {
    pub rho: ScalarField,
    pub m_density: VectorField3,
    pub sigma: VectorField3,
}

pub fn to_lie_poisson(
    state: &HydroState,
    fields: &FieldConfig,
    params: &PhysParams,
) -> LiePoissonState {
    let grid = state.rho.grid.clone();
    let a = fields.uniform_a();
    let (hbar, m, q) = (params.hbar, params.mass, params.charge);
    let mut m_density = VectorField3::zeros(&grid);
    let mut sigma = VectorField3::zeros(&grid);
    for i in 0..state.rho.len() {
        let rho = state.rho.data[i];
        for c in 0..3 {
            m_density.comps[c][i] = rho * (m * state.u.comps[c][i] + q * a[c]);
            sigma.comps[c][i] = 0.5 * params.c_g * hbar * rho * state.s.comps[c][i];
        }
    }
    LiePoissonState {
        rho: state.rho.clone(),
        m_density,
        sigma,
    }
}

pub fn from_lie_poisson(
    lp: &LiePoissonState,
    fields: &FieldConfig,
    params: &PhysParams,
) -> Result<HydroState> {
    let grid = lp.rho.grid.clone();
    let a = fields.uniform_a();
    let (hbar, m, q) = (params.hbar, params.mass, params.charge);
    let mut u = VectorField3::zeros(&grid);
    let mut s = VectorField3::zeros(&grid);
    for i in 0..lp.rho.len() {
        let rho = lp.rho.data[i];
        if rho <= 0.0 {
            return Err(Error::NonPositiveDensity {
                min_rho: rho,
                index: i,
            });
        }
        for c in 0..3 {
            u.comps[c][i] = lp.m_density.comps[c][i] / (m * rho) - q * a[c] / m;
            s.comps[c][i] = 2.0 * lp.sigma.comps[c][i] / (params.c_g * hbar * rho);
        }
    }
    Ok(HydroState {
        rho: lp.rho.clone(),
        u,
        s,
    })
}

/// A functional of the hydrodynamic state with analytic functional
/// derivatives, for quadrature tests of the Poisson bracket.
#[derive(Debug, Clone)]
pub enum TestFunctional {
    /// `int rho f dV`
    MassWeighted(ScalarField),
    /// `int rho u . w dV`
    Momentum(VectorField3),
    /// `int rho |u|^2 / 2 dV`
    KineticEnergy,
    /// `int rho s . v dV`
    SpinMoment(VectorField3),
    /// `int rho^2 g / 2 dV`
    QuadraticDensity(ScalarField),
    /// `int rho (s . v)^2 / 2 dV`
    SpinQuadratic(VectorField3),
}

impl TestFunctional {
    pub fn value(&self, ops: &SpectralOps, state: &HydroState) -> f64 {
        let grid = state.rho.grid.clone();
        let mut density = ScalarField::zeros(&grid);
        for i in 0..grid.len() {
            let rho = state.rho.data[i];
            density.data[i] = match self {
                TestFunctional::MassWeighted(f) => rho * f.data[i],
                TestFunctional::Momentum(w) => {
                    let u = state.u.at(i);
                    let wv = w.at(i);
                    rho * (u[0] * wv[0] + u[1] * wv[1] + u[2] * wv[2])
                }
                TestFunctional::KineticEnergy => {
                    let u = state.u.at(i);
                    0.5 * rho * (u[0] * u[0] + u[1] * u[1] + u[2] * u[2])
                }
                TestFunctional::SpinMoment(v) => {
                    let s = state.s.at(i);
                    let vv = v.at(i);
                    rho * (s[0] * vv[0] + s[1] * vv[1] + s[2] * vv[2])
                }
                TestFunctional::QuadraticDensity(g) => 0.5 * rho * rho * g.data[i],
                TestFunctional::SpinQuadratic(v) => {
                    let s = state.s.at(i);
                    let vv = v.at(i);
                    let sv = s[0] * vv[0] + s[1] * vv[1] + s[2] * vv[2];
                    0.5 * rho * sv * sv
                }
            };
        }
        ops.integrate(&density)
    }

    pub fn derivatives(&self, state: &HydroState) -> FunctionalDerivs {
        let grid = state.rho.grid.clone();
        let n = grid.len();
        let mut d_rho = ScalarField::zeros(&grid);
        let mut d_u = VectorField3::zeros(&grid);
        let mut d_s = VectorField3::zeros(&grid);
        for i in 0..n {
            let rho = state.rho.data[i];
            match self {
                TestFunctional::MassWeighted(f) => d_rho.data[i] = f.data[i],
                TestFunctional::Momentum(w) => {
                    let u = state.u.at(i);
                    let wv = w.at(i);
                    d_rho.data[i] = u[0] * wv[0] + u[1] * wv[1] + u[2] * wv[2];
                    for c in 0..3 {
                        d_u.comps[c][i] = rho * wv[c];
                    }
                }
                TestFunctional::KineticEnergy => {
                    let u = state.u.at(i);
                    d_rho.data[i] = 0.5 * (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
                    for c in 0..3 {
                        d_u.comps[c][i] = rho * u[c];
                    }
                }
                TestFunctional::SpinMoment(v) => {
                    let s = state.s.at(i);
                    let vv = v.at(i);
                    d_rho.data[i] = s[0] * vv[0] + s[1] * vv[1] + s[2] * vv[2];
                    for c in 0..3 {
                        d_s.comps[c][i] = rho * vv[c];
                    }
                }
                TestFunctional::QuadraticDensity(g) => d_rho.data[i] = rho * g.data[i],
                TestFunctional::SpinQuadratic(v) => {
                    let s = state.s.at(i);
                    let vv = v.at(i);
                    let sv = s[0] * vv[0] + s[1] * vv[1] + s[2] * vv[2];
                    d_rho.data[i] = 0.5 * sv * sv;
                    for c in 0..3 {
                        d_s.comps[c][i] = rho * sv * vv[c];
                    }
                }
            }
        }
        FunctionalDerivs { d_rho, d_u, d_s }
    }
}

/// Quadrature of the noncanonical Poisson bracket `{F, G}` from the
/// functional derivatives of F and G:
///
/// `{F,G} = int [ -(1/m) F_rho div(G_u) - (1/m) F_u . grad(G_rho)
///               - (1/m rho) F_u . (curl(u + qA/m) x G_u)
///               + (1/m rho) sum_k (G_{s_k} F_u - F_{s_k} G_u) . grad(s_k)
///               - (2/c_g hbar rho) F_s . (s x G_s) ] dV`
pub fn poisson_bracket(
    ops: &SpectralOps,
    state: &HydroState,
    params: &PhysParams,
    f: &FunctionalDerivs,
    g: &FunctionalDerivs,
) -> f64 {
    let grid = state.rho.grid.clone();
    let n = grid.len();
    let m = params.mass;
    let cg_hbar = params.c_g * params.hbar;
    let div_gu = ops.div(&g.d_u);
    let grad_grho = ops.grad(&g.d_rho);
    let omega = canonical_curl(ops, state);
    let jac_s = ops.jacobian(&state.s);
    let mut density = ScalarField::zeros(&grid);
    for i in 0..n {
        let rho = state.rho.data[i];
        let fu = f.d_u.at(i);
        let gu = g.d_u.at(i);
        let mut v = -f.d_rho.data[i] * div_gu.data[i] / m;
        for c in 0..3 {
            v -= fu[c] * grad_grho.comps[c][i] / m;
        }
        let wx = cross3(omega.at(i), gu);
        for c in 0..3 {
            v -= fu[c] * wx[c] / (m * rho);
        }
        for k in 0..3 {
            let mut adv = 0.0;
            for c in 0..3 {
                adv += (g.d_s.comps[k][i] * fu[c] - f.d_s.comps[k][i] * gu[c])
                    * jac_s[k].comps[c][i];
            }
            v += adv / (m * rho);
        }
        let s = state.s.at(i);
        let sxgs = cross3(s, g.d_s.at(i));
        let fs = f.d_s.at(i);
        v -= 2.0 / (cg_hbar * rho) * (fs[0] * sxgs[0] + fs[1] * sxgs[1] + fs[2] * sxgs[2]);
        density.data[i] = v;
    }
    ops.integrate(&density)
}

/// `|{F,G} + {G,F}| / max(|{F,G}|, floor)`, both brackets evaluated
/// independently.
pub fn antisymmetry_residual(
    ops: &SpectralOps,
    state: &HydroState,
    params: &PhysParams,
    f: &FunctionalDerivs,
    g: &FunctionalDerivs,
) -> f64 {
    let fg = poisson_bracket(ops, state, params, f, g);
    let gf = poisson_bracket(ops, state, params, g, f);
    (fg + gf).abs() / fg.abs().max(1e-30)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn homogeneous_state_has_zero_energy_and_derivatives() {
        let g = Grid::line(16, 2.0).unwrap();
        let ops = SpectralOps::new(&g);
        let state = HydroState::uniform(&g, [0.0, 0.0, 1.0]);
        let params = PhysParams::natural();
        let fields = FieldConfig::free();
        let h = total_energy(&ops, &state, &fields, &params);
        assert!(h.abs() < 1e-13);
        let d = functional_derivatives(&ops, &state, &fields, &params);
        assert!(d.d_rho.max_abs() < 1e-12);
        assert!(d.d_u.max_abs() < 1e-12);
        assert!(d.d_s.max_abs() < 1e-12);
    }

    #[test]
    fn plane_flow_kinetic_energy() {
        let g = Grid::line(16, 2.0).unwrap();
        let ops = SpectralOps::new(&g);
        let mut state = HydroState::uniform(&g, [0.0, 0.0, 1.0]);
        state.u = VectorField3::constant(&g, [0.7, 0.0, 0.0]);
        let h = total_energy(&ops, &state, &FieldConfig::free(), &PhysParams::natural());
        assert!((h - 0.5 * 0.7 * 0.7).abs() < 1e-13, "H = {h}");
    }

    #[test]
    fn lie_poisson_round_trip() {
        let g = Grid::line(16, 2.0).unwrap();
        let ops = SpectralOps::new(&g);
        let _ = &ops;
        let mut state = HydroState::uniform(&g, [0.6, 0.0, 0.8]);
        for i in 0..g.len() {
            state.rho.data[i] *= 1.0 + 0.2 * (i as f64 / g.len() as f64 - 0.5);
            state.u.comps[0][i] = 0.1 * (i as f64);
        }
        let params = PhysParams::natural();
        let fields = FieldConfig {
            a_mode: crate::em::AMode::Uniform([0.3, -0.2, 0.05]),
            ..Default::default()
        };
        let lp = to_lie_poisson(&state, &fields, &params);
        let back = from_lie_poisson(&lp, &fields, &params).unwrap();
        assert!(crate::field::rel_l2_scalar(&back.rho, &state.rho) < 1e-15);
        assert!(crate::field::rel_l2_vector(&back.u, &state.u) < 1e-14);
        assert!(crate::field::rel_l2_vector(&back.s, &state.s) < 1e-14);
        // |Sigma| = (c_g hbar / 2) rho
        for i in 0..g.len() {
            let sg = lp.sigma.at(i);
            let norm = (sg[0] * sg[0] + sg[1] * sg[1] + sg[2] * sg[2]).sqrt();
            assert!((norm - 0.5 * state.rho.data[i]).abs() < 1e-14);
        }
    }
}
