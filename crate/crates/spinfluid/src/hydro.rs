//! Direct time integration of the fluid-with-spin system:
//! continuity, momentum with quantum and spin-stress forces, and spin
//! transport/precession, in the generalized form with constants kappa_s and
//! c_g (the Pauli correspondence is the kappa_s = c_g = 1, P = V = 0 case).

use crate::em::FieldConfig;
use crate::error::{Error, Result};
use crate::field::{rel_l2_scalar, rel_l2_vector_weighted, ScalarField, VectorField3};
use crate::madelung::{forward_transform, HydroState, SpinorField};
use crate::params::{PhysParams, PressureLaw};
use crate::pauli::step_pauli;
use crate::spectral::SpectralOps;

/// Interaction terms supplied by the plasma module for one species:
/// the spatial gradient of the mean-field potential taken at frozen spin
/// (the force), and the spin-gradient of the potential (the torque source).
#[derive(Debug, Clone)]
pub struct InteractionTerms {
    pub grad_phi_frozen_s: VectorField3,
    pub dphi_ds: VectorField3,
}

/// Time derivative of a hydrodynamic state.
#[derive(Debug, Clone)]
pub struct HydroRhs {
    pub drho: ScalarField,
    pub du: VectorField3,
    pub ds: VectorField3,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RhsStats {
    /// Points where the density floor was active in divisions.
    pub floor_active: usize,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct StepStats {
    /// Max |s|-deviation from 1 before the optional projection.
    pub spin_drift: f64,
    /// Max pointwise change applied by the projection.
    pub projection_change: f64,
    pub floor_active: usize,
}

impl HydroRhs {
    pub fn zeros_like(state: &HydroState) -> Self {
        HydroRhs {
            drho: ScalarField::zeros(&state.rho.grid),
            du: VectorField3::zeros(&state.rho.grid),
            ds: VectorField3::zeros(&state.rho.grid),
        }
    }

    pub fn axpy_rhs(&mut self, c: f64, other: &HydroRhs) {
        self.drho.axpy(c, &other.drho);
        self.du.axpy(c, &other.du);
        self.ds.axpy(c, &other.ds);
    }
}

/// Right-hand side of the fluid-with-spin system:
///
/// drho/dt = -div(rho u)
/// du/dt   = -(u.grad)u + (q/m) u x B [Lorentz regimes only]
///           - (1/m) grad(q Phi + V + h'(rho) + c_g^2 Q)
///           + (c_g kappa_s q hbar / 2 m^2) s_k grad(B^k)
///           - (c_g^2 / m rho) div(Pi)
/// ds/dt   = -(u.grad)s + kappa_s (q/m) s x B
///           + (c_g hbar / 2m) s x [lap(s) + (grad(log rho).grad) s]
///
/// plus the mean-field force/torque when `interaction` is given.
pub fn hydro_rhs(
    ops: &SpectralOps,
    state: &HydroState,
    fields: &FieldConfig,
    params: &PhysParams,
    interaction: Option<&InteractionTerms>,
    dealias: bool,
) -> (HydroRhs, RhsStats) {
    let grid = ops.grid().clone();
    let n = grid.len();
    let (hbar, m, q) = (params.hbar, params.mass, params.charge);
    let (cg, ks) = (params.c_g, params.kappa_s);

    let mean_rho = state.rho.data.iter().sum::<f64>() / n as f64;
    let floor = params.rho_floor(mean_rho);
    let mut floor_active = 0usize;

    // continuity
    let mut rho_u = VectorField3::zeros(&grid);
    for c in 0..3 {
        for i in 0..n {
            rho_u.comps[c][i] = state.rho.data[i] * state.u.comps[c][i];
        }
    }
    let mut drho = ops.div(&rho_u);
    drho.scale(-1.0);

    // shared derivatives
    let grad_rho = ops.grad(&state.rho);
    let jac_u = ops.jacobian(&state.u);
    let jac_s = ops.jacobian(&state.s);
    let lap_s = ops.vector_lap(&state.s);

    // grad(log rho): grad(rho)/rho where rho > floor, zero where floored
    let mut glog = VectorField3::zeros(&grid);
    for i in 0..n {
        let r = state.rho.data[i];
        if r > floor {
            for c in 0..3 {
                glog.comps[c][i] = grad_rho.comps[c][i] / r;
            }
        } else {
            floor_active += 1;
        }
    }

    // quantum potential with a floored denominator
    let sqrt_rho = state.rho.map(|r| r.max(0.0).sqrt());
    let lap_sqrt = ops.lap(&sqrt_rho);
    let sqrt_floor = floor.sqrt();
    let mut q_pot = ScalarField::zeros(&grid);
    for i in 0..n {
        q_pot.data[i] = -hbar * hbar / (2.0 * m) * lap_sqrt.data[i]
            / sqrt_rho.data[i].max(sqrt_floor);
    }

    // scalar potential: q Phi + V + h'(rho) + c_g^2 Q
    let mut u_pot = q_pot;
    u_pot.scale(cg * cg);
    if let Some(phi) = &fields.phi {
        u_pot.axpy(q, phi);
    }
    if let Some(v_ext) = &params.v_ext {
        u_pot.add_assign(v_ext);
    }
    if params.pressure != PressureLaw::None {
        for i in 0..n {
            u_pot.data[i] += params.pressure.h_prime(state.rho.data[i].max(floor));
        }
    }
    let grad_u_pot = ops.grad(&u_pot);

    // spin-stress divergence:
    // divPi_j = (hbar^2/4m) [ sum_k div(rho grad s_k) d_j s_k + (rho/2) d_j |grad s|^2 ]
    let mut grad_s_sq = ScalarField::zeros(&grid);
    for k in 0..3 {
        for c in 0..3 {
            for i in 0..n {
                let g = jac_s[k].comps[c][i];
                grad_s_sq.data[i] += g * g;
            }
        }
    }
    let grad_of_grad_s_sq = ops.grad(&grad_s_sq);
    let mut div_rho_grad_s = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for k in 0..3 {
        for i in 0..n {
            let mut adv = 0.0;
            for c in 0..3 {
                adv += grad_rho.comps[c][i] * jac_s[k].comps[c][i];
            }
            div_rho_grad_s[k][i] = adv + state.rho.data[i] * lap_s.comps[k][i];
        }
    }

    let b = fields.b_field.as_ref();
    let jac_b = b.map(|bf| ops.jacobian(bf));
    let lorentz = fields.lorentz_active();

    // momentum
    let mut du = VectorField3::zeros(&grid);
    let pi_coeff = hbar * hbar / (4.0 * m);
    for j in 0..3 {
        for i in 0..n {
            let mut a = 0.0;
            // advection -(u.grad)u_j
            for c in 0..3 {
                a -= state.u.comps[c][i] * jac_u[j].comps[c][i];
            }
            // potential force
            a -= grad_u_pot.comps[j][i] / m;
            // spin stress
            let mut divpi = 0.0;
            for k in 0..3 {
                divpi += div_rho_grad_s[k][i] * jac_s[k].comps[j][i];
            }
            divpi = pi_coeff * (divpi + 0.5 * state.rho.data[i] * grad_of_grad_s_sq.comps[j][i]);
            a -= cg * cg * divpi / (m * state.rho.data[i].max(floor));
            // magnetic-moment force s_k grad B^k
            if let Some(jb) = &jac_b {
                let mut sg = 0.0;
                for k in 0..3 {
                    sg += state.s.comps[k][i] * jb[k].comps[j][i];
                }
                a += cg * ks * q * hbar / (2.0 * m * m) * sg;
            }
            du.comps[j][i] = a;
        }
    }
    if lorentz {
        let b = b.unwrap();
        for i in 0..n {
            let v = crate::field::cross3(state.u.at(i), b.at(i));
            for j in 0..3 {
                du.comps[j][i] += q / m * v[j];
            }
        }
    }
    if let Some(int) = interaction {
        for j in 0..3 {
            for i in 0..n {
                du.comps[j][i] -= int.grad_phi_frozen_s.comps[j][i] / m;
            }
        }
    }

    // spin: -(u.grad)s + kappa_s (q/m) s x B
    //       + (c_g hbar/2m) s x [lap s + (grad log rho . grad) s]
    let mut ds = VectorField3::zeros(&grid);
    for i in 0..n {
        let s = state.s.at(i);
        let mut torque_arg = [0.0; 3];
        for k in 0..3 {
            let mut adv_log = 0.0;
            for c in 0..3 {
                adv_log += glog.comps[c][i] * jac_s[k].comps[c][i];
            }
            torque_arg[k] = lap_s.comps[k][i] + adv_log;
        }
        let mut d = crate::field::cross3(s, torque_arg);
        for k in 0..3 {
            d[k] *= cg * hbar / (2.0 * m);
        }
        if let Some(b) = b {
            let prec = crate::field::cross3(s, b.at(i));
            for k in 0..3 {
                d[k] += ks * q / m * prec[k];
            }
        }
        for k in 0..3 {
            let mut adv = 0.0;
            for c in 0..3 {
                adv += state.u.comps[c][i] * jac_s[k].comps[c][i];
            }
            ds.comps[k][i] = d[k] - adv;
        }
    }
    if let Some(int) = interaction {
        let two_over = 2.0 / (params.c_g * hbar);
        for i in 0..n {
            let t = crate::field::cross3(state.s.at(i), int.dphi_ds.at(i));
            for k in 0..3 {
                ds.comps[k][i] -= two_over * t[k];
            }
        }
    }

    if dealias {
        ops.dealias(&mut drho);
        ops.dealias_vector(&mut du);
        ops.dealias_vector(&mut ds);
    }

    (HydroRhs { drho, du, ds }, RhsStats { floor_active })
}

/// `state + c * rhs` (shared by the standalone and plasma steppers so that
/// a decoupled plasma run is bit-identical to standalone stepping).
pub fn add_scaled_state(state: &HydroState, rhs: &HydroRhs, c: f64) -> HydroState {
    let mut out = state.clone();
    out.rho.axpy(c, &rhs.drho);
    out.u.axpy(c, &rhs.du);
    out.s.axpy(c, &rhs.ds);
    out
}

/// Provider of interaction terms per RK stage (the plasma module recomputes
/// the mean-field potential from the partner species at each stage).
pub type StageInteraction<'a> = &'a dyn Fn(&HydroState) -> Option<InteractionTerms>;

/// One classical RK4 step. If `renormalize_spin`, s is projected back onto
/// |s| = 1 after the step; the pre-projection drift is reported either way.
pub fn step_hydro(
    ops: &SpectralOps,
    state: &HydroState,
    fields: &FieldConfig,
    params: &PhysParams,
    dt: f64,
    renormalize_spin: bool,
    dealias: bool,
) -> Result<(HydroState, StepStats)> {
    step_hydro_interacting(ops, state, fields, params, dt, renormalize_spin, dealias, &|_| None, 0.0)
}

/// RK4 step with a per-stage interaction provider (used by the plasma
/// module; standalone runs pass a provider that returns `None`).
#[allow(clippy::too_many_arguments)]
pub fn step_hydro_interacting(
    ops: &SpectralOps,
    state: &HydroState,
    fields: &FieldConfig,
    params: &PhysParams,
    dt: f64,
    renormalize_spin: bool,
    dealias: bool,
    interaction: StageInteraction,
    time: f64,
) -> Result<(HydroState, StepStats)> {
    let n = ops.grid().len();
    let budget = (n as f64 * 1e-3).max(0.0);

    let mut max_floor = 0usize;
    let eval = |s: &HydroState| -> (HydroRhs, usize) {
        let terms = interaction(s);
        let (rhs, stats) = hydro_rhs(ops, s, fields, params, terms.as_ref(), dealias);
        (rhs, stats.floor_active)
    };

    let (k1, f1) = eval(state);
    let s2 = add_scaled_state(state, &k1, 0.5 * dt);
    let (k2, f2) = eval(&s2);
    let s3 = add_scaled_state(state, &k2, 0.5 * dt);
    let (k3, f3) = eval(&s3);
    let s4 = add_scaled_state(state, &k3, dt);
    let (k4, f4) = eval(&s4);
    max_floor = max_floor.max(f1).max(f2).max(f3).max(f4);

    let mut incr = HydroRhs::zeros_like(state);
    incr.axpy_rhs(1.0, &k1);
    incr.axpy_rhs(2.0, &k2);
    incr.axpy_rhs(2.0, &k3);
    incr.axpy_rhs(1.0, &k4);
    let mut out = add_scaled_state(state, &incr, dt / 6.0);

    if max_floor as f64 > budget {
        return Err(Error::VacuumBreakdown {
            time,
            active: max_floor,
            total: n,
            percent: 100.0 * max_floor as f64 / n as f64,
        });
    }

    let spin_drift = out.spin_norm_deviation();
    if spin_drift > 1e-4 {
        return Err(Error::SpinDriftAlarm {
            drift: spin_drift,
            time,
        });
    }
    let projection_change = if renormalize_spin {
        out.renormalize_spin()
    } else {
        0.0
    };
    out.rho.check_finite("rho after step")?;
    out.u.check_finite("u after step")?;
    out.s.check_finite("s after step")?;
    Ok((
        out,
        StepStats {
            spin_drift,
            projection_change,
            floor_active: max_floor,
        },
    ))
}

/// Differences between the Madelung transform of the evolving Pauli
/// solution and the directly evolved hydrodynamic solution: plain relative
/// L2 for the density, density-weighted relative L2 for velocity and spin
/// (they are conditional fields, defined where there is fluid).
#[derive(Debug, Clone)]
pub struct CorrespondenceReport {
    pub times: Vec<f64>,
    pub err_rho: Vec<f64>,
    pub err_u: Vec<f64>,
    pub err_s: Vec<f64>,
    /// Time of numerical breakdown, if the hydro side broke down before
    /// `t_final` (the report then covers [0, breakdown)).
    pub breakdown: Option<f64>,
    pub max_mass_defect: f64,
    pub max_spin_drift: f64,
}

impl CorrespondenceReport {
    pub fn final_errors(&self) -> (f64, f64, f64) {
        let last = self.times.len() - 1;
        (self.err_rho[last], self.err_u[last], self.err_s[last])
    }
}

/// Evolve Psi with the Pauli solver and M(Psi0) with the hydro solver on the
/// same grid and time interval; sample the relative L2 differences of
/// (rho, u, s) at `n_outputs` evenly spaced times.
#[allow(clippy::too_many_arguments)]
pub fn correspondence_error(
    ops: &SpectralOps,
    psi0: &SpinorField,
    fields: &FieldConfig,
    params: &PhysParams,
    t_final: f64,
    dt: f64,
    n_outputs: usize,
    dealias: bool,
) -> Result<CorrespondenceReport> {
    fields.validate(ops.grid())?;
    params.validate()?;
    let steps = (t_final / dt).round().max(1.0) as usize;
    let output_every = (steps / n_outputs.max(1)).max(1);

    let mut psi = psi0.clone();
    let mut hydro = forward_transform(ops, psi0, fields, params)?;
    let mass0 = hydro.mass(ops);

    let mut report = CorrespondenceReport {
        times: vec![0.0],
        err_rho: vec![0.0],
        err_u: vec![0.0],
        err_s: vec![0.0],
        breakdown: None,
        max_mass_defect: 0.0,
        max_spin_drift: 0.0,
    };

    for step in 1..=steps {
        psi = step_pauli(ops, &psi, fields, params, dt)?;
        let t = step as f64 * dt;
        match step_hydro(ops, &hydro, fields, params, dt, true, dealias) {
            Ok((next, stats)) => {
                hydro = next;
                report.max_spin_drift = report.max_spin_drift.max(stats.spin_drift);
            }
            Err(e @ (Error::VacuumBreakdown { .. } | Error::SpinDriftAlarm { .. })) => {
                let _ = e;
                report.breakdown = Some(t);
                return Ok(report);
            }
            Err(e) => return Err(e),
        }
        if step % output_every == 0 || step == steps {
            let reference = forward_transform(ops, &psi, fields, params)?;
            report.times.push(t);
            report.err_rho.push(rel_l2_scalar(&hydro.rho, &reference.rho));
            report
                .err_u
                .push(rel_l2_vector_weighted(&hydro.u, &reference.u, &reference.rho));
            report
                .err_s
                .push(rel_l2_vector_weighted(&hydro.s, &reference.s, &reference.rho));
            report.max_mass_defect = report
                .max_mass_defect
                .max((hydro.mass(ops) - mass0).abs());
        }
    }
    Ok(report)
}
