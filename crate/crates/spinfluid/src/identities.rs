//! Numerical verification of the algebraic and differential identities that
//! connect the spinor decomposition (rho_1, rho_2, theta_1, theta_2, eta,
//! phi) with the hydrodynamic fields, plus the kinetic-energy split of the
//! spin transport velocity.

use crate::em::FieldConfig;
use crate::error::Result;
use crate::field::{ScalarField, VectorField3, SYM_PAIRS};
use crate::grid::Grid;
use crate::madelung::{
    angle_gradients, forward_transform, spin_stress, spin_stress_angles, spin_velocity,
    SpinorField,
};
use crate::params::PhysParams;
use crate::rng::{band_limited_scalar, CounterRng};
use crate::spectral::SpectralOps;

pub const POLE_MASK_EPS: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct IdentityRow {
    pub name: &'static str,
    pub max_residual: f64,
    pub l2_residual: f64,
    pub masked_points: usize,
}

#[derive(Debug, Clone, Default)]
pub struct IdentityReport {
    pub rows: Vec<IdentityRow>,
}

impl IdentityReport {
    pub fn max_residual(&self) -> f64 {
        self.rows.iter().fold(0.0, |m, r| m.max(r.max_residual))
    }

    pub fn row(&self, name: &str) -> Option<&IdentityRow> {
        self.rows.iter().find(|r| r.name == name)
    }
}

/// Relative pointwise and L2 residuals of `lhs` vs `rhs`, skipping masked
/// points. The scale is the larger of the two max-norms.
fn residuals(lhs: &[f64], rhs: &[f64], mask: Option<&[bool]>) -> (f64, f64, usize) {
    let mut scale: f64 = 0.0;
    for i in 0..lhs.len() {
        if mask.map(|m| m[i]).unwrap_or(false) {
            continue;
        }
        scale = scale.max(lhs[i].abs()).max(rhs[i].abs());
    }
    let scale = scale.max(1e-300);
    let mut max_res: f64 = 0.0;
    let mut sum_sq = 0.0;
    let mut count = 0usize;
    let mut masked = 0usize;
    for i in 0..lhs.len() {
        if mask.map(|m| m[i]).unwrap_or(false) {
            masked += 1;
            continue;
        }
        let d = (lhs[i] - rhs[i]).abs() / scale;
        max_res = max_res.max(d);
        sum_sq += d * d;
        count += 1;
    }
    (max_res, (sum_sq / count.max(1) as f64).sqrt(), masked)
}

struct Decomposition {
    rho: ScalarField,
    rho1: ScalarField,
    rho2: ScalarField,
    u: VectorField3,
    s: VectorField3,
    grad_theta1: VectorField3,
    grad_theta2: VectorField3,
    grad_eta: VectorField3,
    grad_phi: VectorField3,
    sin_eta_sq: Vec<f64>,
    vq1: ScalarField,
    vq2: ScalarField,
    q_total: ScalarField,
    pole_mask: Vec<bool>,
}

fn decompose(
    ops: &SpectralOps,
    psi: &SpinorField,
    fields: &FieldConfig,
    params: &PhysParams,
) -> Result<Decomposition> {
    let grid = ops.grid().clone();
    let n = grid.len();
    let hbar = params.hbar;
    let state = forward_transform(ops, psi, fields, params)?;
    let rho1 = psi.psi1.abs_sq();
    let rho2 = psi.psi2.abs_sq();

    // grad(theta_i) = hbar Im(psi_i^* grad psi_i) / |psi_i|^2
    let mut grad_theta1 = VectorField3::zeros(&grid);
    let mut grad_theta2 = VectorField3::zeros(&grid);
    let d1 = ops.grad_complex(&psi.psi1);
    let d2 = ops.grad_complex(&psi.psi2);
    for c in 0..3 {
        for i in 0..n {
            grad_theta1.comps[c][i] =
                hbar * (psi.psi1.data[i].conj() * d1[c].data[i]).im / rho1.data[i].max(1e-300);
            grad_theta2.comps[c][i] =
                hbar * (psi.psi2.data[i].conj() * d2[c].data[i]).im / rho2.data[i].max(1e-300);
        }
    }

    let (grad_eta, grad_phi, sin_eta_sq) = angle_gradients(ops, &state.s);
    let pole_mask: Vec<bool> = (0..n)
        .map(|i| sin_eta_sq[i].sqrt() < POLE_MASK_EPS)
        .collect();

    let vq = |r: &ScalarField| -> ScalarField {
        let sq = r.map(f64::sqrt);
        let lap = ops.lap(&sq);
        ScalarField {
            grid: grid.clone(),
            data: lap
                .data
                .iter()
                .zip(&sq.data)
                .map(|(&l, &s)| -hbar * hbar / (2.0 * params.mass) * l / s.max(1e-300))
                .collect(),
        }
    };
    let vq1 = vq(&rho1);
    let vq2 = vq(&rho2);
    let q_total = vq(&state.rho);

    Ok(Decomposition {
        rho: state.rho,
        rho1,
        rho2,
        u: state.u,
        s: state.s,
        grad_theta1,
        grad_theta2,
        grad_eta,
        grad_phi,
        sin_eta_sq,
        vq1,
        vq2,
        q_total,
        pole_mask,
    })
}

/// Run the full identity suite on a spinor state. B (if any) enters only the
/// algebraic magnetic identities; `fields.uniform_a()` shifts the kinetic
/// momenta.
pub fn verify_identities(
    ops: &SpectralOps,
    psi: &SpinorField,
    fields: &FieldConfig,
    params: &PhysParams,
) -> Result<IdentityReport> {
    let grid = ops.grid().clone();
    let n = grid.len();
    let (hbar, m, q) = (params.hbar, params.mass, params.charge);
    let dec = decompose(ops, psi, fields, params)?;
    let mut report = IdentityReport::default();

    // magnetic potential-energy combination:
    // rho1 M1 + rho2 M2 = -(q hbar / 2m) rho B.s
    {
        let b = match &fields.b_field {
            Some(b) => b.clone(),
            None => VectorField3::zeros(&grid),
        };
        let mut lhs = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        let c = -q * hbar / (2.0 * m);
        for i in 0..n {
            let sin_eta = dec.sin_eta_sq[i].sqrt().max(1e-300);
            let cos_phi = dec.s.comps[0][i] / sin_eta;
            let sin_phi = dec.s.comps[1][i] / sin_eta;
            let bv = b.at(i);
            let bperp = bv[0] * cos_phi + bv[1] * sin_phi;
            let r1 = dec.rho1.data[i];
            let r2 = dec.rho2.data[i];
            let m1 = c * (bv[2] + (r2 / r1).max(0.0).sqrt() * bperp);
            let m2 = c * (-bv[2] + (r1 / r2).max(0.0).sqrt() * bperp);
            lhs[i] = r1 * m1 + r2 * m2;
            let s = dec.s.at(i);
            rhs[i] = c * dec.rho.data[i] * (bv[0] * s[0] + bv[1] * s[1] + bv[2] * s[2]);
        }
        let (mx, l2, masked) = residuals(&lhs, &rhs, Some(&dec.pole_mask));
        report.rows.push(IdentityRow {
            name: "m_combined",
            max_residual: mx,
            l2_residual: l2,
            masked_points: masked,
        });
    }

    // quantum-potential combination:
    // rho1 Vq1 + rho2 Vq2 = rho Q + (hbar^2 / 8m) rho |grad eta|^2
    {
        let mut lhs = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 0..n {
            lhs[i] = dec.rho1.data[i] * dec.vq1.data[i] + dec.rho2.data[i] * dec.vq2.data[i];
            let mut ge2 = 0.0;
            for c in 0..3 {
                ge2 += dec.grad_eta.comps[c][i] * dec.grad_eta.comps[c][i];
            }
            rhs[i] = dec.rho.data[i] * dec.q_total.data[i]
                + hbar * hbar / (8.0 * m) * dec.rho.data[i] * ge2;
        }
        let (mx, l2, masked) = residuals(&lhs, &rhs, Some(&dec.pole_mask));
        report.rows.push(IdentityRow {
            name: "vq_combined",
            max_residual: mx,
            l2_residual: l2,
            masked_points: masked,
        });
    }

    // momentum-flux split:
    // rho1 p1xp1 + rho2 p2xp2 = m^2 rho uxu + (rho hbar^2/4) sin^2(eta) gphi x gphi
    {
        let a = fields.uniform_a();
        let mut max_res: f64 = 0.0;
        let mut l2_acc = 0.0;
        let mut masked_total = 0;
        for &(ci, cj) in SYM_PAIRS.iter() {
            let mut lhs = vec![0.0; n];
            let mut rhs = vec![0.0; n];
            for i in 0..n {
                let p1i = dec.grad_theta1.comps[ci][i] - q * a[ci];
                let p1j = dec.grad_theta1.comps[cj][i] - q * a[cj];
                let p2i = dec.grad_theta2.comps[ci][i] - q * a[ci];
                let p2j = dec.grad_theta2.comps[cj][i] - q * a[cj];
                lhs[i] = dec.rho1.data[i] * p1i * p1j + dec.rho2.data[i] * p2i * p2j;
                rhs[i] = m * m * dec.rho.data[i] * dec.u.comps[ci][i] * dec.u.comps[cj][i]
                    + dec.rho.data[i] * hbar * hbar / 4.0
                        * dec.sin_eta_sq[i]
                        * dec.grad_phi.comps[ci][i]
                        * dec.grad_phi.comps[cj][i];
            }
            let (mx, l2, masked) = residuals(&lhs, &rhs, Some(&dec.pole_mask));
            max_res = max_res.max(mx);
            l2_acc += l2 * l2;
            masked_total = masked_total.max(masked);
        }
        report.rows.push(IdentityRow {
            name: "flux_split",
            max_residual: max_res,
            l2_residual: (l2_acc / 6.0).sqrt(),
            masked_points: masked_total,
        });
    }

    // quantum-potential difference:
    // Vq2 - Vq1 = -(hbar^2/2m) div(rho grad eta) / (rho sin eta)
    {
        let mut rho_grad_eta = VectorField3::zeros(&grid);
        for c in 0..3 {
            for i in 0..n {
                rho_grad_eta.comps[c][i] = dec.rho.data[i] * dec.grad_eta.comps[c][i];
            }
        }
        let div = ops.div(&rho_grad_eta);
        let mut lhs = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 0..n {
            lhs[i] = dec.vq2.data[i] - dec.vq1.data[i];
            let sin_eta = dec.sin_eta_sq[i].sqrt().max(1e-300);
            rhs[i] = -hbar * hbar / (2.0 * m) * div.data[i] / (dec.rho.data[i] * sin_eta);
        }
        let (mx, l2, masked) = residuals(&lhs, &rhs, Some(&dec.pole_mask));
        report.rows.push(IdentityRow {
            name: "vq_difference",
            max_residual: mx,
            l2_residual: l2,
            masked_points: masked,
        });
    }

    // spin stress: cartesian form vs angle form, componentwise
    {
        let pi_s = spin_stress(ops, &dec.rho, &dec.s, params);
        let (pi_a, mask) = spin_stress_angles(ops, &dec.rho, &dec.s, params, POLE_MASK_EPS);
        let mut max_res: f64 = 0.0;
        let mut l2_acc = 0.0;
        let mut masked_total = 0;
        for slot in 0..6 {
            let (mx, l2, masked) = residuals(&pi_s.comps[slot], &pi_a.comps[slot], Some(&mask));
            max_res = max_res.max(mx);
            l2_acc += l2 * l2;
            masked_total = masked_total.max(masked);
        }
        report.rows.push(IdentityRow {
            name: "pi_spin_forms",
            max_residual: max_res,
            l2_residual: (l2_acc / 6.0).sqrt(),
            masked_points: masked_total,
        });
    }

    // divergence of the spin stress: tensor-divergence vs angle form
    {
        let pi_s = spin_stress(ops, &dec.rho, &dec.s, params);
        // lhs_j = sum_i d_i Pi^{ij}
        let mut lhs = VectorField3::zeros(&grid);
        for j in 0..3 {
            let mut row = VectorField3::zeros(&grid);
            for i_ax in 0..3 {
                row.comps[i_ax] = pi_s.comp(i_ax, j).to_vec();
            }
            lhs.comps[j] = ops.div(&row).data;
        }
        // rhs per the angle form
        let mut rho_ge = VectorField3::zeros(&grid);
        let mut rho_s2_gp = VectorField3::zeros(&grid);
        let mut ge2 = ScalarField::zeros(&grid);
        let mut gp2 = ScalarField::zeros(&grid);
        for i in 0..n {
            for c in 0..3 {
                rho_ge.comps[c][i] = dec.rho.data[i] * dec.grad_eta.comps[c][i];
                rho_s2_gp.comps[c][i] =
                    dec.rho.data[i] * dec.sin_eta_sq[i] * dec.grad_phi.comps[c][i];
                ge2.data[i] += dec.grad_eta.comps[c][i] * dec.grad_eta.comps[c][i];
                gp2.data[i] += dec.grad_phi.comps[c][i] * dec.grad_phi.comps[c][i];
            }
        }
        let div_rho_ge = ops.div(&rho_ge);
        let div_rho_s2_gp = ops.div(&rho_s2_gp);
        let grad_ge2 = ops.grad(&ge2);
        let grad_gp2 = ops.grad(&gp2);
        let mut rhs = VectorField3::zeros(&grid);
        let coeff = hbar * hbar / (4.0 * m);
        for j in 0..3 {
            for i in 0..n {
                rhs.comps[j][i] = coeff
                    * (div_rho_ge.data[i] * dec.grad_eta.comps[j][i]
                        + 0.5 * dec.rho.data[i] * grad_ge2.comps[j][i]
                        + div_rho_s2_gp.data[i] * dec.grad_phi.comps[j][i]
                        + 0.5 * dec.rho.data[i] * dec.sin_eta_sq[i] * grad_gp2.comps[j][i]);
            }
        }
        let mut max_res: f64 = 0.0;
        let mut l2_acc = 0.0;
        let mut masked_total = 0;
        for j in 0..3 {
            let (mx, l2, masked) = residuals(&lhs.comps[j], &rhs.comps[j], Some(&dec.pole_mask));
            max_res = max_res.max(mx);
            l2_acc += l2 * l2;
            masked_total = masked_total.max(masked);
        }
        report.rows.push(IdentityRow {
            name: "div_pi_forms",
            max_residual: max_res,
            l2_residual: (l2_acc / 3.0).sqrt(),
            masked_points: masked_total,
        });
    }

    // Frobenius-norm decomposition (any unit field):
    // |grad s|^2 = |curl s|^2 + (div s)^2 + div[(s.grad)s - (div s)s]
    {
        let (mx, l2) = frobenius_residual(ops, &dec.s);
        report.rows.push(IdentityRow {
            name: "frob_norm",
            max_residual: mx,
            l2_residual: l2,
            masked_points: 0,
        });
    }

    Ok(report)
}

/// |grad s|^2 = |curl s|^2 + (div s)^2 + div[(s.grad)s - (div s)s].
fn frobenius_residual(ops: &SpectralOps, s: &VectorField3) -> (f64, f64) {
    let grid = ops.grid().clone();
    let n = grid.len();
    let jac = ops.jacobian(s);
    let curl = ops.curl(s);
    let div_s = ops.div(s);
    let mut lhs = vec![0.0; n];
    for k in 0..3 {
        for c in 0..3 {
            for i in 0..n {
                let g = jac[k].comps[c][i];
                lhs[i] += g * g;
            }
        }
    }
    // (s.grad)s - (div s) s
    let mut flux = VectorField3::zeros(&grid);
    for k in 0..3 {
        for i in 0..n {
            let mut adv = 0.0;
            for c in 0..3 {
                adv += s.comps[c][i] * jac[k].comps[c][i];
            }
            flux.comps[k][i] = adv - div_s.data[i] * s.comps[k][i];
        }
    }
    let div_flux = ops.div(&flux);
    let mut rhs = vec![0.0; n];
    for i in 0..n {
        let cv = curl.at(i);
        rhs[i] = cv[0] * cv[0] + cv[1] * cv[1] + cv[2] * cv[2]
            + div_s.data[i] * div_s.data[i]
            + div_flux.data[i];
    }
    let (mx, l2, _) = residuals(&lhs, &rhs, None);
    (mx, l2)
}

/// The kinetic-energy split of the spin transport velocity. On states with
/// `div(rho s) = 0` the transport kinetic energy splits exactly into the
/// quantum, spin-stress, and remainder terms.
#[derive(Debug, Clone, Copy)]
pub struct KsSplit {
    /// `K_s = (m/2) int rho v_s^2 dV`
    pub ks: f64,
    /// `(c_g^2 hbar^2 / 8m) int rho |grad log rho|^2 dV`
    pub e_quantum: f64,
    /// `(c_g^2 hbar^2 / 8m) int rho |grad s|^2 dV`
    pub e_spin_stress: f64,
    /// `(c_g^2 hbar^2 / 8m) int rho div[(s.grad)s - (div s)s] dV`
    pub e_remainder: f64,
    /// `max |div(rho s)|` of the input state.
    pub ansatz_residual: f64,
}

impl KsSplit {
    /// Relative defect of `K_s = E_q + E_ds + E_R`.
    pub fn split_defect(&self) -> f64 {
        let sum = self.e_quantum + self.e_spin_stress + self.e_remainder;
        (self.ks - sum).abs() / self.ks.abs().max(1e-300)
    }
}

pub fn ks_split(
    ops: &SpectralOps,
    rho: &ScalarField,
    s: &VectorField3,
    params: &PhysParams,
) -> Result<KsSplit> {
    let grid = ops.grid().clone();
    let n = grid.len();
    let (hbar, m, cg) = (params.hbar, params.mass, params.c_g);
    let coeff = cg * cg * hbar * hbar / (8.0 * m);

    let vs = spin_velocity(ops, rho, s, params)?;
    let mut ks_density = ScalarField::zeros(&grid);
    for i in 0..n {
        let v = vs.at(i);
        ks_density.data[i] = 0.5 * m * rho.data[i] * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    }
    let ks = ops.integrate(&ks_density);

    let grad_rho = ops.grad(rho);
    let mut eq_density = ScalarField::zeros(&grid);
    for i in 0..n {
        let mut g2 = 0.0;
        for c in 0..3 {
            let g = grad_rho.comps[c][i] / rho.data[i];
            g2 += g * g;
        }
        eq_density.data[i] = coeff * rho.data[i] * g2;
    }
    let e_quantum = ops.integrate(&eq_density);

    let jac = ops.jacobian(s);
    let mut eds_density = ScalarField::zeros(&grid);
    for i in 0..n {
        let mut g2 = 0.0;
        for k in 0..3 {
            for c in 0..3 {
                let g = jac[k].comps[c][i];
                g2 += g * g;
            }
        }
        eds_density.data[i] = coeff * rho.data[i] * g2;
    }
    let e_spin_stress = ops.integrate(&eds_density);

    let div_s = ops.div(s);
    let mut flux = VectorField3::zeros(&grid);
    for k in 0..3 {
        for i in 0..n {
            let mut adv = 0.0;
            for c in 0..3 {
                adv += s.comps[c][i] * jac[k].comps[c][i];
            }
            flux.comps[k][i] = adv - div_s.data[i] * s.comps[k][i];
        }
    }
    let div_flux = ops.div(&flux);
    let mut er_density = ScalarField::zeros(&grid);
    for i in 0..n {
        er_density.data[i] = coeff * rho.data[i] * div_flux.data[i];
    }
    let e_remainder = ops.integrate(&er_density);

    let mut rho_s = VectorField3::zeros(&grid);
    for c in 0..3 {
        for i in 0..n {
            rho_s.comps[c][i] = rho.data[i] * s.comps[c][i];
        }
    }
    let ansatz_residual = ops.div(&rho_s).max_abs();

    Ok(KsSplit {
        ks,
        e_quantum,
        e_spin_stress,
        e_remainder,
        ansatz_residual,
    })
}

/// Random helical state satisfying `div(rho s) = 0` exactly: fields vary
/// along the first grid axis only and the spin lies in the orthogonal plane.
pub fn helical_ansatz_state(
    ops: &SpectralOps,
    rng: &CounterRng,
) -> (ScalarField, VectorField3) {
    let grid = ops.grid().clone();
    let axis_len = grid.lengths()[0];
    let theta_amp = rng.range_at(1000, 0.5, 2.0);
    let theta = band_limited_scalar(&grid_profile(&grid), &rng.stream(11), 3, theta_amp);
    let rho_pert = band_limited_scalar(&grid_profile(&grid), &rng.stream(12), 3, 0.4);
    let n0 = grid.sizes()[0];
    let mut rho = ScalarField::zeros(&grid);
    let mut s = VectorField3::zeros(&grid);
    for i in 0..grid.len() {
        let x = grid.coords(i)[0];
        let j = ((x / axis_len * n0 as f64).round() as usize) % n0;
        let th = theta.data[j];
        rho.data[i] = 1.0 + rho_pert.data[j];
        s.comps[0][i] = 0.0;
        s.comps[1][i] = th.cos();
        s.comps[2][i] = th.sin();
    }
    let mass: f64 = rho.data.iter().sum::<f64>() * grid.cell_volume();
    rho.scale(1.0 / mass);
    (rho, s)
}

fn grid_profile(grid: &Grid) -> Grid {
    Grid::new(&[grid.sizes()[0]], &[grid.lengths()[0]]).unwrap()
}

/// Random 2D state satisfying `div(rho s) = 0` exactly with nonvanishing
/// remainder energy: `rho s = (d_y chi, -d_x chi, m3)` for a stream function
/// `chi = c y + small periodic part` and a z-independent out-of-plane
/// component `m3(x, y)` (its divergence contribution is identically zero,
/// and it bends the surfaces orthogonal to s so the curvature term does not
/// degenerate). `rho = |rho s|`, normalized to unit mass.
pub fn stream_ansatz_state(ops: &SpectralOps, rng: &CounterRng) -> (ScalarField, VectorField3) {
    let grid = ops.grid().clone();
    assert!(grid.dim() >= 2, "stream ansatz needs a 2D grid");
    let n = grid.len();
    let c = 1.0;
    let chi_pert = band_limited_scalar(&grid, &rng.stream(21), 3, 0.25);
    let mut gchi = ops.grad(&chi_pert);
    // keep |grad chi_pert| well below the linear slope so rho stays bounded
    // away from zero and spectrally smooth
    let gmax = gchi.max_abs();
    if gmax > 0.25 {
        gchi.scale(0.25 / gmax);
    }
    let m3 = band_limited_scalar(&grid, &rng.stream(22), 3, 0.3);
    // rho s = (c + d_y pert, -d_x pert, m3)
    let mut rho = ScalarField::zeros(&grid);
    let mut s = VectorField3::zeros(&grid);
    for i in 0..n {
        let mx = c + gchi.comps[1][i];
        let my = -gchi.comps[0][i];
        let mz = m3.data[i];
        let mag = (mx * mx + my * my + mz * mz).sqrt();
        rho.data[i] = mag;
        s.comps[0][i] = mx / mag;
        s.comps[1][i] = my / mag;
        s.comps[2][i] = mz / mag;
    }
    let mass: f64 = rho.data.iter().sum::<f64>() * grid.cell_volume();
    rho.scale(1.0 / mass);
    (rho, s)
}

/// Analytic description of a random spinor built from band-limited angle
/// and density profiles, with the spin kept away from the poles
/// (`sin eta >= ~0.3`). Evaluable at arbitrary points so that independent
/// finite-difference oracles can use their own step size.
#[derive(Debug, Clone)]
pub struct SpinorSpec {
    eta: crate::rng::BandLimitedSpec,
    phi: crate::rng::BandLimitedSpec,
    rho_pert: crate::rng::BandLimitedSpec,
    theta1: crate::rng::BandLimitedSpec,
    pub amplitude_scale: f64,
}

impl SpinorSpec {
    pub fn new(grid: &Grid, rng: &CounterRng, band: i64) -> Self {
        Self::with_strength(grid, rng, band, 1.0)
    }

    /// `strength` scales all four profile amplitudes; gentler states have
    /// faster-decaying harmonic tails (useful for 1e-8-level quadrature
    /// identities at moderate grid sizes).
    pub fn with_strength(grid: &Grid, rng: &CounterRng, band: i64, strength: f64) -> Self {
        SpinorSpec {
            eta: crate::rng::band_limited_spec(grid, &rng.stream(1), band, 0.9 * strength),
            phi: crate::rng::band_limited_spec(grid, &rng.stream(2), band, 1.2 * strength),
            rho_pert: crate::rng::band_limited_spec(grid, &rng.stream(3), band, 0.35 * strength),
            theta1: crate::rng::band_limited_spec(grid, &rng.stream(4), band, 0.8 * strength),
            amplitude_scale: 1.0,
        }
    }

    pub fn eval(&self, x: [f64; 3]) -> (num_complex::Complex64, num_complex::Complex64) {
        let eta = std::f64::consts::FRAC_PI_2 + self.eta.eval(x).clamp(-1.1, 1.1);
        let rho = (1.0 + self.rho_pert.eval(x)) * self.amplitude_scale * self.amplitude_scale;
        let theta1 = self.theta1.eval(x);
        let phi = self.phi.eval(x);
        let half = 0.5 * eta;
        (
            num_complex::Complex64::from_polar(rho.sqrt() * half.cos(), theta1),
            num_complex::Complex64::from_polar(rho.sqrt() * half.sin(), theta1 + phi),
        )
    }

    /// Sample on the grid and fix `amplitude_scale` so the state is
    /// normalized there.
    pub fn sample_normalized(&mut self, ops: &SpectralOps) -> SpinorField {
        let grid = ops.grid().clone();
        let mut psi = SpinorField::new(
            crate::field::ComplexField::from_fn(&grid, |x| self.eval(x).0),
            crate::field::ComplexField::from_fn(&grid, |x| self.eval(x).1),
        );
        let norm = psi.norm(ops);
        let c = num_complex::Complex64::new(1.0 / norm.sqrt(), 0.0);
        psi.psi1.scale(c);
        psi.psi2.scale(c);
        self.amplitude_scale /= norm.sqrt();
        psi
    }
}

/// Random band-limited spinor with the spin angles kept away from the poles
/// (`sin eta >= ~0.3`), suitable for the identity suite.
pub fn random_identity_spinor(ops: &SpectralOps, rng: &CounterRng) -> SpinorField {
    SpinorSpec::new(ops.grid(), rng, 3).sample_normalized(ops)
}

/// Smoother variant (half the band) for oracles that need deeper spectral
/// resolution at moderate grid sizes.
pub fn smooth_identity_spinor(ops: &SpectralOps, rng: &CounterRng) -> SpinorField {
    SpinorSpec::new(ops.grid(), rng, 2).sample_normalized(ops)
}

/// Gentle variant (half band, half strength) whose harmonic tails are deep
/// enough for 1e-8-level integral identities at N = 64..128.
pub fn gentle_identity_spinor(ops: &SpectralOps, rng: &CounterRng) -> SpinorField {
    SpinorSpec::with_strength(ops.grid(), rng, 2, 0.5).sample_normalized(ops)
}
