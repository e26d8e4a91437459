//! Madelung transform of two-component spinor fields and its inverse,
//! plus the derived quantum/spin quantities.

use crate::em::FieldConfig;
use crate::error::{Error, Result};
use crate::field::{ComplexField, ScalarField, SymTensorField, VectorField3, SYM_PAIRS};
use crate::grid::Grid;
use crate::params::PhysParams;
use crate::spectral::SpectralOps;
use num_complex::Complex64;

/// Two-component spinor field on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    pub psi1: ComplexField,
    pub psi2: ComplexField,
}

/// Hydrodynamic state: density, velocity, unit spin field.
#[derive(Debug, Clone, PartialEq)]
pub struct HydroState {
    pub rho: ScalarField,
    pub u: VectorField3,
    pub s: VectorField3,
}

impl SpinorField {
    pub fn new(psi1: ComplexField, psi2: ComplexField) -> Self {
        debug_assert_eq!(psi1.grid, psi2.grid);
        SpinorField { psi1, psi2 }
    }

    pub fn grid(&self) -> &Grid {
        &self.psi1.grid
    }

    /// rho = |psi1|^2 + |psi2|^2.
    pub fn density(&self) -> ScalarField {
        let mut rho = self.psi1.abs_sq();
        let r2 = self.psi2.abs_sq();
        rho.add_assign(&r2);
        rho
    }

    /// Total norm integral(rho dV).
    pub fn norm(&self, ops: &SpectralOps) -> f64 {
        ops.integrate(&self.density())
    }

    /// Scale so that integral(rho dV) = 1.
    pub fn normalize(&mut self, ops: &SpectralOps) {
        let n = self.norm(ops);
        let c = Complex64::new(1.0 / n.sqrt(), 0.0);
        self.psi1.scale(c);
        self.psi2.scale(c);
    }

    /// Multiply by a constant global phase factor.
    pub fn rotate_phase(&mut self, alpha: f64) {
        let c = Complex64::from_polar(1.0, alpha);
        self.psi1.scale(c);
        self.psi2.scale(c);
    }

    pub fn check_finite(&self) -> Result<()> {
        self.psi1.check_finite("psi1")?;
        self.psi2.check_finite("psi2")
    }
}

impl HydroState {
    pub fn grid(&self) -> &Grid {
        &self.rho.grid
    }

    /// Uniform state: rho = 1/V, u = 0, s = given unit direction.
    pub fn uniform(grid: &Grid, spin: [f64; 3]) -> Self {
        let norm = (spin[0] * spin[0] + spin[1] * spin[1] + spin[2] * spin[2]).sqrt();
        let s = [spin[0] / norm, spin[1] / norm, spin[2] / norm];
        HydroState {
            rho: ScalarField::constant(grid, 1.0 / grid.volume()),
            u: VectorField3::zeros(grid),
            s: VectorField3::constant(grid, s),
        }
    }

    pub fn mass(&self, ops: &SpectralOps) -> f64 {
        ops.integrate(&self.rho)
    }

    /// Max pointwise deviation of |s| from 1.
    pub fn spin_norm_deviation(&self) -> f64 {
        let mut max_dev: f64 = 0.0;
        for i in 0..self.s.len() {
            let v = self.s.at(i);
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            max_dev = max_dev.max((n - 1.0).abs());
        }
        max_dev
    }

    /// Validate positivity of rho, |s| = 1 within `spin_tol`, finiteness.
    pub fn check_invariants(&self, spin_tol: f64) -> Result<()> {
        self.rho.check_finite("rho")?;
        self.u.check_finite("u")?;
        self.s.check_finite("s")?;
        let mut min_rho = f64::INFINITY;
        let mut min_idx = 0;
        for (i, &r) in self.rho.data.iter().enumerate() {
            if r < min_rho {
                min_rho = r;
                min_idx = i;
            }
        }
        if min_rho <= 0.0 {
            return Err(Error::NonPositiveDensity {
                min_rho,
                index: min_idx,
            });
        }
        let mut max_dev: f64 = 0.0;
        let mut dev_idx = 0;
        for i in 0..self.s.len() {
            let v = self.s.at(i);
            let dev = ((v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt() - 1.0).abs();
            if dev > max_dev {
                max_dev = dev;
                dev_idx = i;
            }
        }
        if max_dev > spin_tol {
            return Err(Error::SpinNorm {
                max_dev,
                index: dev_idx,
                tol: spin_tol,
            });
        }
        Ok(())
    }

    /// Project s back onto |s| = 1 pointwise; returns the max change.
    pub fn renormalize_spin(&mut self) -> f64 {
        let mut max_change: f64 = 0.0;
        for i in 0..self.s.len() {
            let v = self.s.at(i);
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if n > 0.0 {
                let w = [v[0] / n, v[1] / n, v[2] / n];
                max_change = max_change.max((n - 1.0).abs());
                self.s.set(i, w);
            }
        }
        max_change
    }
}

/// Check the density against the vacuum floor; `Ok(floor)` on success.
fn vacuum_check(rho: &ScalarField, params: &PhysParams) -> Result<f64> {
    let mean = rho.data.iter().sum::<f64>() / rho.data.len() as f64;
    let floor = params.rho_floor(mean);
    let mut count = 0;
    let mut first = usize::MAX;
    let mut min_rho = f64::INFINITY;
    for (i, &r) in rho.data.iter().enumerate() {
        min_rho = min_rho.min(r);
        if r <= floor {
            count += 1;
            if first == usize::MAX {
                first = i;
            }
        }
    }
    if count > 0 {
        return Err(Error::VacuumPoint {
            count,
            total: rho.data.len(),
            floor,
            min_rho,
            first,
        });
    }
    Ok(floor)
}

/// Madelung transform: spinor -> (rho, u, s).
///
/// rho = psi^dag psi,
/// u = (hbar / m rho) Im(psi^dag grad psi) - qA/m,
/// s = psi^dag sigma psi / rho.
pub fn forward_transform(
    ops: &SpectralOps,
    psi: &SpinorField,
    fields: &FieldConfig,
    params: &PhysParams,
) -> Result<HydroState> {
    psi.check_finite()?;
    let rho = psi.density();
    vacuum_check(&rho, params)?;
    let grid = ops.grid().clone();
    let d1 = ops.grad_complex(&psi.psi1);
    let d2 = ops.grad_complex(&psi.psi2);
    let a = fields.uniform_a();
    let (hbar, m, q) = (params.hbar, params.mass, params.charge);
    let mut u = VectorField3::zeros(&grid);
    for c in 0..3 {
        for i in 0..grid.len() {
            let cur = psi.psi1.data[i].conj() * d1[c].data[i] + psi.psi2.data[i].conj() * d2[c].data[i];
            u.comps[c][i] = hbar / m * cur.im / rho.data[i] - q * a[c] / m;
        }
    }
    let mut s = VectorField3::zeros(&grid);
    for i in 0..grid.len() {
        let cross = psi.psi1.data[i].conj() * psi.psi2.data[i];
        let r = rho.data[i];
        s.comps[0][i] = 2.0 * cross.re / r;
        s.comps[1][i] = 2.0 * cross.im / r;
        s.comps[2][i] = (psi.psi1.data[i].norm_sqr() - psi.psi2.data[i].norm_sqr()) / r;
    }
    let state = HydroState { rho, u, s };
    state.check_invariants(1e-8)?;
    Ok(state)
}

/// Spinor reconstruction from hydrodynamic data, unique up to a constant
/// global phase (fixed to zero at `phase_anchor`).
///
/// On regions with sin(eta) > 0 the angles are recovered from s and the
/// first-component phase is integrated from
/// `grad(theta1) = m u + q A - sin^2(eta/2) hbar grad(phi)`,
/// which must have quantized circulation around each axis. When the whole
/// grid is at a spin pole (s = +/- z), the single-component branch is used.
pub fn reconstruct_spinor(
    ops: &SpectralOps,
    state: &HydroState,
    fields: &FieldConfig,
    params: &PhysParams,
    phase_anchor: usize,
) -> Result<SpinorField> {
    state.check_invariants(1e-8)?;
    let grid = ops.grid().clone();
    let n = grid.len();
    let (hbar, m, q) = (params.hbar, params.mass, params.charge);
    let a = fields.uniform_a();

    const POLE_EPS: f64 = 1e-6;
    let all_poles = (0..n).all(|i| {
        let s = state.s.at(i);
        (s[0] * s[0] + s[1] * s[1]).sqrt() < POLE_EPS
    });

    if all_poles {
        // spin-up or spin-down everywhere: one-component wave function
        let up = state.s.comps[2][0] > 0.0;
        let mut g = VectorField3::zeros(&grid);
        for c in 0..3 {
            for i in 0..n {
                g.comps[c][i] = m * state.u.comps[c][i] + q * a[c];
            }
        }
        let (theta, _w) = ops.integrate_gradient(&g, hbar, phase_anchor, 1e-6)?;
        let mut psi_main = ComplexField::zeros(&grid);
        for i in 0..n {
            psi_main.data[i] =
                Complex64::from_polar(state.rho.data[i].sqrt(), theta.data[i] / hbar);
        }
        let zero = ComplexField::zeros(&grid);
        return Ok(if up {
            SpinorField::new(psi_main, zero)
        } else {
            SpinorField::new(zero, psi_main)
        });
    }

    // angles from s: cos(eta) = s3, e^{i phi} = (s1 + i s2)/sin(eta)
    let mut sin_eta_sq = vec![0.0; n];
    for i in 0..n {
        let s = state.s.at(i);
        sin_eta_sq[i] = s[0] * s[0] + s[1] * s[1];
    }
    // grad(phi) = (s1 grad s2 - s2 grad s1) / sin^2(eta), spectral gradients
    let gs1 = ops.grad(&ScalarField {
        grid: grid.clone(),
        data: state.s.comps[0].clone(),
    });
    let gs2 = ops.grad(&ScalarField {
        grid: grid.clone(),
        data: state.s.comps[1].clone(),
    });
    let mut grad_phi = VectorField3::zeros(&grid);
    for c in 0..3 {
        for i in 0..n {
            let denom = sin_eta_sq[i].max(POLE_EPS * POLE_EPS);
            grad_phi.comps[c][i] =
                (state.s.comps[0][i] * gs2.comps[c][i] - state.s.comps[1][i] * gs1.comps[c][i])
                    / denom;
        }
    }
    // grad(theta1) = m u + q A - sin^2(eta/2) hbar grad(phi)
    let mut g1 = VectorField3::zeros(&grid);
    for c in 0..3 {
        for i in 0..n {
            let sin_half_sq = 0.5 * (1.0 - state.s.comps[2][i]); // sin^2(eta/2)
            g1.comps[c][i] =
                m * state.u.comps[c][i] + q * a[c] - sin_half_sq * hbar * grad_phi.comps[c][i];
        }
    }
    let (theta1, _w) = ops.integrate_gradient(&g1, hbar, phase_anchor, 1e-6)?;

    let mut psi1 = ComplexField::zeros(&grid);
    let mut psi2 = ComplexField::zeros(&grid);
    for i in 0..n {
        let r = state.rho.data[i];
        let s3 = state.s.comps[2][i];
        let cos_half = (0.5 * (1.0 + s3)).max(0.0).sqrt();
        let sin_half = (0.5 * (1.0 - s3)).max(0.0).sqrt();
        let e1 = Complex64::from_polar(1.0, theta1.data[i] / hbar);
        // e^{i phi} from s, avoiding atan2 branch cuts
        let sin_eta = sin_eta_sq[i].sqrt();
        let eiphi = if sin_eta > 0.0 {
            Complex64::new(state.s.comps[0][i] / sin_eta, state.s.comps[1][i] / sin_eta)
        } else {
            Complex64::new(1.0, 0.0)
        };
        psi1.data[i] = e1 * r.sqrt() * cos_half;
        psi2.data[i] = e1 * eiphi * r.sqrt() * sin_half;
    }
    Ok(SpinorField::new(psi1, psi2))
}

/// Quantum (Bohm) potential `Q = -(hbar^2/2m) lap(sqrt(rho))/sqrt(rho)`.
pub fn quantum_potential(
    ops: &SpectralOps,
    rho: &ScalarField,
    params: &PhysParams,
) -> Result<ScalarField> {
    rho.check_finite("rho")?;
    for (i, &r) in rho.data.iter().enumerate() {
        if r <= 0.0 {
            return Err(Error::NonPositiveDensity {
                min_rho: r,
                index: i,
            });
        }
    }
    let sqrt_rho = rho.map(f64::sqrt);
    let lap = ops.lap(&sqrt_rho);
    let c = -params.hbar * params.hbar / (2.0 * params.mass);
    Ok(ScalarField {
        grid: rho.grid.clone(),
        data: lap
            .data
            .iter()
            .zip(&sqrt_rho.data)
            .map(|(&l, &s)| c * l / s)
            .collect(),
    })
}

/// Spin-stress tensor `Pi^{ij} = (hbar^2 rho / 4m) d_i s . d_j s`
/// (symmetric by construction).
pub fn spin_stress(
    ops: &SpectralOps,
    rho: &ScalarField,
    s: &VectorField3,
    params: &PhysParams,
) -> SymTensorField {
    let grid = ops.grid().clone();
    let jac = ops.jacobian(s); // jac[k] = grad(s_k)
    let c = params.hbar * params.hbar / (4.0 * params.mass);
    let mut out = SymTensorField::zeros(&grid);
    for (slot, &(i, j)) in SYM_PAIRS.iter().enumerate() {
        for p in 0..grid.len() {
            let mut dot = 0.0;
            for k in 0..3 {
                dot += jac[k].comps[i][p] * jac[k].comps[j][p];
            }
            out.comps[slot][p] = c * rho.data[p] * dot;
        }
    }
    out
}

/// Spin-stress tensor in the angle parameterization,
/// `Pi^{ij} = (hbar^2 rho/4m)(d_i eta d_j eta + sin^2 eta d_i phi d_j phi)`,
/// with the angle gradients obtained from s. Near-pole points
/// (sin eta < `pole_eps`) are reported in the mask.
pub fn spin_stress_angles(
    ops: &SpectralOps,
    rho: &ScalarField,
    s: &VectorField3,
    params: &PhysParams,
    pole_eps: f64,
) -> (SymTensorField, Vec<bool>) {
    let grid = ops.grid().clone();
    let n = grid.len();
    let (grad_eta, grad_phi, sin_eta_sq) = angle_gradients(ops, s);
    let mask: Vec<bool> = (0..n)
        .map(|i| sin_eta_sq[i].sqrt() < pole_eps)
        .collect();
    let c = params.hbar * params.hbar / (4.0 * params.mass);
    let mut out = SymTensorField::zeros(&grid);
    for (slot, &(i, j)) in SYM_PAIRS.iter().enumerate() {
        for p in 0..n {
            let v = grad_eta.comps[i][p] * grad_eta.comps[j][p]
                + sin_eta_sq[p] * grad_phi.comps[i][p] * grad_phi.comps[j][p];
            out.comps[slot][p] = c * rho.data[p] * v;
        }
    }
    (out, mask)
}

/// Gradients of the spin angles computed from s:
/// grad(eta) = -grad(s3)/sin(eta), grad(phi) = (s1 grad s2 - s2 grad s1)/sin^2(eta).
/// Returns (grad_eta, grad_phi, sin^2(eta)).
pub fn angle_gradients(
    ops: &SpectralOps,
    s: &VectorField3,
) -> (VectorField3, VectorField3, Vec<f64>) {
    let grid = ops.grid().clone();
    let n = grid.len();
    let jac = ops.jacobian(s);
    let mut sin_eta_sq = vec![0.0; n];
    for i in 0..n {
        sin_eta_sq[i] = s.comps[0][i] * s.comps[0][i] + s.comps[1][i] * s.comps[1][i];
    }
    let mut grad_eta = VectorField3::zeros(&grid);
    let mut grad_phi = VectorField3::zeros(&grid);
    const TINY: f64 = 1e-300;
    for c in 0..3 {
        for i in 0..n {
            let sin_eta = sin_eta_sq[i].sqrt();
            grad_eta.comps[c][i] = -jac[2].comps[c][i] / sin_eta.max(TINY);
            grad_phi.comps[c][i] = (s.comps[0][i] * jac[1].comps[c][i]
                - s.comps[1][i] * jac[0].comps[c][i])
                / sin_eta_sq[i].max(TINY);
        }
    }
    (grad_eta, grad_phi, sin_eta_sq)
}

/// Spin transport velocity
/// `v_s = (c_g hbar / 2m)(grad(log rho) x s + curl s)`.
pub fn spin_velocity(
    ops: &SpectralOps,
    rho: &ScalarField,
    s: &VectorField3,
    params: &PhysParams,
) -> Result<VectorField3> {
    for (i, &r) in rho.data.iter().enumerate() {
        if r <= 0.0 {
            return Err(Error::NonPositiveDensity {
                min_rho: r,
                index: i,
            });
        }
    }
    let grid = ops.grid().clone();
    let grad_rho = ops.grad(rho);
    let curl_s = ops.curl(s);
    let c = params.c_g * params.hbar / (2.0 * params.mass);
    let mut out = VectorField3::zeros(&grid);
    for i in 0..grid.len() {
        let w = [
            grad_rho.comps[0][i] / rho.data[i],
            grad_rho.comps[1][i] / rho.data[i],
            grad_rho.comps[2][i] / rho.data[i],
        ];
        let sv = s.at(i);
        let cr = crate::field::cross3(w, sv);
        out.set(
            i,
            [
                c * (cr[0] + curl_s.comps[0][i]),
                c * (cr[1] + curl_s.comps[1][i]),
                c * (cr[2] + curl_s.comps[2][i]),
            ],
        );
    }
    Ok(out)
}

/// Helicity density of the spin field, `h_s = s . curl s`.
pub fn spin_helicity(ops: &SpectralOps, s: &VectorField3) -> ScalarField {
    let curl_s = ops.curl(s);
    s.dot(&curl_s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::em::FieldConfig;
    use std::f64::consts::PI;

    fn uniform_spinor(grid: &Grid) -> SpinorField {
        let v = grid.volume();
        let c = Complex64::new(1.0 / v.sqrt(), 0.0);
        let psi1 = ComplexField::from_fn(grid, |_| c);
        let psi2 = ComplexField::zeros(grid);
        SpinorField::new(psi1, psi2)
    }

    #[test]
    fn uniform_spin_up_state() {
        let g = Grid::line(16, 4.0).unwrap();
        let ops = SpectralOps::new(&g);
        let psi = uniform_spinor(&g);
        let st = forward_transform(&ops, &psi, &FieldConfig::free(), &PhysParams::natural())
            .unwrap();
        for i in 0..g.len() {
            assert!((st.rho.data[i] - 0.25).abs() < 1e-14);
            assert!(st.u.at(i).iter().all(|&v| v.abs() < 1e-12));
            let s = st.s.at(i);
            assert!((s[2] - 1.0).abs() < 1e-14 && s[0].abs() < 1e-14 && s[1].abs() < 1e-14);
        }
    }

    #[test]
    fn plane_wave_velocity() {
        let l = 4.0;
        let g = Grid::line(32, l).unwrap();
        let ops = SpectralOps::new(&g);
        let k = 2.0 * PI / l;
        let v = g.volume();
        let psi1 = ComplexField::from_fn(&g, |x| Complex64::from_polar(1.0 / v.sqrt(), k * x[0]));
        let psi = SpinorField::new(psi1, ComplexField::zeros(&g));
        let st = forward_transform(&ops, &psi, &FieldConfig::free(), &PhysParams::natural())
            .unwrap();
        for i in 0..g.len() {
            assert!((st.u.comps[0][i] - k).abs() < 1e-10);
            assert!((st.s.comps[2][i] - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn vacuum_point_rejected() {
        let g = Grid::line(16, 4.0).unwrap();
        let ops = SpectralOps::new(&g);
        let mut psi = uniform_spinor(&g);
        psi.psi1.data[3] = Complex64::new(0.0, 0.0);
        let err = forward_transform(&ops, &psi, &FieldConfig::free(), &PhysParams::natural());
        assert!(matches!(err, Err(Error::VacuumPoint { count: 1, .. })));
    }

    #[test]
    fn quantum_potential_constant_density() {
        let g = Grid::line(16, 2.0).unwrap();
        let ops = SpectralOps::new(&g);
        let rho = ScalarField::constant(&g, 0.5);
        let q = quantum_potential(&ops, &rho, &PhysParams::natural()).unwrap();
        assert!(q.max_abs() < 1e-13);
    }

    #[test]
    fn spin_stress_of_constant_spin_vanishes() {
        let g = Grid::line(16, 2.0).unwrap();
        let ops = SpectralOps::new(&g);
        let rho = ScalarField::constant(&g, 1.0);
        let s = VectorField3::constant(&g, [0.6, 0.0, 0.8]);
        let pi = spin_stress(&ops, &rho, &s, &PhysParams::natural());
        assert!(pi.max_abs() < 1e-13);
    }
}
