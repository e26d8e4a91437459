//! N interacting fluids with spin: per-species dynamics coupled through a
//! mean-field spin-spin interaction, and product-form diagnostics that
//! verify the assembly of the species system into one higher-dimensional
//! fluid with spin (at desk scale, N = 2).

use crate::em::FieldConfig;
use crate::error::{Error, Result};
use crate::field::{cross3, ScalarField, VectorField3};
use crate::hydro::{hydro_rhs, HydroRhs, InteractionTerms};
use crate::madelung::HydroState;
use crate::params::PhysParams;
use crate::spectral::SpectralOps;
use num_complex::Complex64;
use rustfft::FftPlanner;

/// One species: its own grid (via `ops`), state, parameters, and external
/// fields.
pub struct Species {
    pub ops: SpectralOps,
    pub state: HydroState,
    pub params: PhysParams,
    pub fields: FieldConfig,
}

/// Binary interaction kernel `V_ij(x_i, x_j, s_i, s_j)`, symmetric in the
/// pair by construction; self-interaction is excluded (`V_ii = 0`).
#[derive(Debug, Clone)]
pub enum InteractionKernel {
    None,
    /// Space- and spin-independent constant `V_ij = c`.
    Constant(f64),
    /// `V_ij = -J s_i . s_j` (space-independent).
    SpinSpinUniform { j: f64 },
    /// `V_ij = -J s_i . s_j g_i(x_i) g_j(x_j)` with per-species weights.
    SpinSpinSeparable { j: f64, weights: Vec<ScalarField> },
    /// `V_ij = -J s_i . s_j w(x_i - x_j)`; requires all species on one grid.
    SpinSpinConvolution { j: f64, w: ScalarField },
}

pub struct Plasma {
    pub species: Vec<Species>,
    pub kernel: InteractionKernel,
    pub dealias: bool,
    pub renormalize_spin: bool,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PlasmaStepStats {
    pub max_spin_drift: f64,
    pub max_floor_active: usize,
}

impl Plasma {
    pub fn validate(&self) -> Result<()> {
        for sp in &self.species {
            sp.params.validate()?;
            sp.fields.validate(sp.ops.grid())?;
            sp.state.check_invariants(1e-6)?;
        }
        match &self.kernel {
            InteractionKernel::SpinSpinSeparable { weights, .. } => {
                if weights.len() != self.species.len() {
                    return Err(Error::Kernel(format!(
                        "{} separable weights for {} species",
                        weights.len(),
                        self.species.len()
                    )));
                }
                for (i, w) in weights.iter().enumerate() {
                    if w.grid != *self.species[i].ops.grid() {
                        return Err(Error::Kernel(format!(
                            "separable weight {i} is not on the species grid"
                        )));
                    }
                }
            }
            InteractionKernel::SpinSpinConvolution { w, .. } => {
                for sp in &self.species {
                    if *sp.ops.grid() != w.grid {
                        return Err(Error::Kernel(
                            "convolution kernel requires all species on the kernel grid".into(),
                        ));
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn has_interaction(&self) -> bool {
        match &self.kernel {
            InteractionKernel::None => false,
            InteractionKernel::Constant(c) => *c != 0.0,
            InteractionKernel::SpinSpinUniform { j } => *j != 0.0,
            InteractionKernel::SpinSpinSeparable { j, .. } => *j != 0.0,
            InteractionKernel::SpinSpinConvolution { j, .. } => *j != 0.0,
        }
    }
}

/// Weighted spin moment `int rho g s dV` of one species state.
fn weighted_moment(ops: &SpectralOps, state: &HydroState, weight: Option<&ScalarField>) -> [f64; 3] {
    let dv = ops.grid().cell_volume();
    let mut m = [0.0; 3];
    for i in 0..state.rho.len() {
        let g = weight.map(|w| w.data[i]).unwrap_or(1.0);
        let r = state.rho.data[i] * g;
        let s = state.s.at(i);
        for c in 0..3 {
            m[c] += r * s[c];
        }
    }
    for v in &mut m {
        *v *= dv;
    }
    m
}

/// Periodic convolution `(w * f)(x) = int w(x - y) f(y) dy` on one grid.
fn convolve(ops: &SpectralOps, w: &ScalarField, f: &ScalarField) -> ScalarField {
    let n = f.data.len();
    let mut wf: Vec<Complex64> = w.data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut ff: Vec<Complex64> = f.data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    ops.fft(&mut wf);
    ops.fft(&mut ff);
    for i in 0..n {
        ff[i] *= wf[i];
    }
    ops.ifft(&mut ff);
    let dv = w.grid.cell_volume();
    ScalarField {
        grid: w.grid.clone(),
        data: ff.iter().map(|z| z.re * dv).collect(),
    }
}

/// Mean interaction potential of species `i` and its spin-gradient,
/// `Phi_i(x_i) = sum_{j != i} int rho_j V_ij dV_j` and `dPhi_i/ds_i`,
/// evaluated from the given per-species states.
pub fn mean_field_potential(
    plasma: &Plasma,
    states: &[HydroState],
    i: usize,
) -> Result<(ScalarField, VectorField3)> {
    let sp = &plasma.species[i];
    let grid = sp.ops.grid().clone();
    let n = grid.len();
    match &plasma.kernel {
        InteractionKernel::None => Ok((ScalarField::zeros(&grid), VectorField3::zeros(&grid))),
        InteractionKernel::Constant(c) => {
            let others = plasma.species.len() - 1;
            Ok((
                ScalarField::constant(&grid, *c * others as f64),
                VectorField3::zeros(&grid),
            ))
        }
        InteractionKernel::SpinSpinUniform { j } => {
            let mut cvec = [0.0; 3];
            for (jj, other) in plasma.species.iter().enumerate() {
                if jj == i {
                    continue;
                }
                let m = weighted_moment(&other.ops, &states[jj], None);
                for c in 0..3 {
                    cvec[c] -= j * m[c];
                }
            }
            let dphi_ds = VectorField3::constant(&grid, cvec);
            let mut phi = ScalarField::zeros(&grid);
            for p in 0..n {
                let s = states[i].s.at(p);
                phi.data[p] = s[0] * cvec[0] + s[1] * cvec[1] + s[2] * cvec[2];
            }
            Ok((phi, dphi_ds))
        }
        InteractionKernel::SpinSpinSeparable { j, weights } => {
            let mut cvec = [0.0; 3];
            for (jj, other) in plasma.species.iter().enumerate() {
                if jj == i {
                    continue;
                }
                let m = weighted_moment(&other.ops, &states[jj], Some(&weights[jj]));
                for c in 0..3 {
                    cvec[c] -= j * m[c];
                }
            }
            let gi = &weights[i];
            let mut phi = ScalarField::zeros(&grid);
            let mut dphi_ds = VectorField3::zeros(&grid);
            for p in 0..n {
                let s = states[i].s.at(p);
                let sc = s[0] * cvec[0] + s[1] * cvec[1] + s[2] * cvec[2];
                phi.data[p] = gi.data[p] * sc;
                for c in 0..3 {
                    dphi_ds.comps[c][p] = gi.data[p] * cvec[c];
                }
            }
            Ok((phi, dphi_ds))
        }
        InteractionKernel::SpinSpinConvolution { j, w } => {
            let mut h = VectorField3::zeros(&grid);
            for (jj, other) in plasma.species.iter().enumerate() {
                if jj == i {
                    continue;
                }
                for c in 0..3 {
                    let mut rs = ScalarField::zeros(&grid);
                    for p in 0..n {
                        rs.data[p] = states[jj].rho.data[p] * states[jj].s.comps[c][p];
                    }
                    let conv = convolve(&other.ops, w, &rs);
                    for p in 0..n {
                        h.comps[c][p] -= j * conv.data[p];
                    }
                }
            }
            let mut phi = ScalarField::zeros(&grid);
            for p in 0..n {
                let s = states[i].s.at(p);
                let hv = h.at(p);
                phi.data[p] = s[0] * hv[0] + s[1] * hv[1] + s[2] * hv[2];
            }
            Ok((phi, h))
        }
    }
}

/// Interaction force/torque inputs of species `i` for the momentum and spin
/// equations: the spatial gradient of `Phi_i` at frozen spin, and
/// `dPhi_i/ds_i`. Returns `None` when the kernel exerts neither force nor
/// torque, so the decoupled path is bit-identical to a standalone run.
fn interaction_terms(
    plasma: &Plasma,
    states: &[HydroState],
    i: usize,
) -> Result<Option<InteractionTerms>> {
    if !plasma.has_interaction() {
        return Ok(None);
    }
    let sp = &plasma.species[i];
    let grid = sp.ops.grid().clone();
    let n = grid.len();
    let (_, dphi_ds) = mean_field_potential(plasma, states, i)?;
    let grad_frozen = match &plasma.kernel {
        InteractionKernel::None => VectorField3::zeros(&grid),
        // constant and space-independent kernels exert no force
        InteractionKernel::Constant(_) | InteractionKernel::SpinSpinUniform { .. } => {
            VectorField3::zeros(&grid)
        }
        InteractionKernel::SpinSpinSeparable { weights, .. } => {
            // Phi_i = g_i(x) (s_i . c); frozen-s gradient = (s_i . c) grad g_i
            let grad_g = sp.ops.grad(&weights[i]);
            let mut out = VectorField3::zeros(&grid);
            for p in 0..n {
                let s = states[i].s.at(p);
                let d = dphi_ds.at(p);
                // s . c = (s . dphi_ds) / g_i ; use the product rule directly:
                // (s.c) grad g = (s . dphi_ds) grad g / g  -- guard g ~ 0
                let g = weights[i].data[p];
                let sc = if g.abs() > 1e-300 {
                    (s[0] * d[0] + s[1] * d[1] + s[2] * d[2]) / g
                } else {
                    0.0
                };
                for c in 0..3 {
                    out.comps[c][p] = sc * grad_g.comps[c][p];
                }
            }
            out
        }
        InteractionKernel::SpinSpinConvolution { .. } => {
            // Phi_i = s_i . H(x); frozen-s gradient = sum_k s_i^k grad H^k
            let jac_h = sp.ops.jacobian(&dphi_ds);
            let mut out = VectorField3::zeros(&grid);
            for p in 0..n {
                let s = states[i].s.at(p);
                for c in 0..3 {
                    let mut acc = 0.0;
                    for k in 0..3 {
                        acc += s[k] * jac_h[k].comps[c][p];
                    }
                    out.comps[c][p] = acc;
                }
            }
            out
        }
    };
    Ok(Some(InteractionTerms {
        grad_phi_frozen_s: grad_frozen,
        dphi_ds,
    }))
}

/// Simultaneous RK4 update of all species; the mean-field potential is
/// recomputed from the current partner states at every stage.
pub fn step_plasma(plasma: &mut Plasma, dt: f64, time: f64) -> Result<PlasmaStepStats> {
    let n_species = plasma.species.len();
    let states0: Vec<HydroState> = plasma.species.iter().map(|s| s.state.clone()).collect();

    let eval = |plasma: &Plasma, states: &[HydroState]| -> Result<Vec<(HydroRhs, usize)>> {
        let mut out = Vec::with_capacity(n_species);
        for i in 0..n_species {
            let terms = interaction_terms(plasma, states, i)?;
            let sp = &plasma.species[i];
            let (rhs, stats) = hydro_rhs(
                &sp.ops,
                &states[i],
                &sp.fields,
                &sp.params,
                terms.as_ref(),
                plasma.dealias,
            );
            out.push((rhs, stats.floor_active));
        }
        Ok(out)
    };
    let advance = |base: &[HydroState], ks: &[(HydroRhs, usize)], c: f64| -> Vec<HydroState> {
        base.iter()
            .zip(ks)
            .map(|(s, (k, _))| crate::hydro::add_scaled_state(s, k, c))
            .collect()
    };

    let k1 = eval(plasma, &states0)?;
    let s2 = advance(&states0, &k1, 0.5 * dt);
    let k2 = eval(plasma, &s2)?;
    let s3 = advance(&states0, &k2, 0.5 * dt);
    let k3 = eval(plasma, &s3)?;
    let s4 = advance(&states0, &k3, dt);
    let k4 = eval(plasma, &s4)?;

    let mut stats = PlasmaStepStats::default();
    for i in 0..n_species {
        let mut incr = HydroRhs::zeros_like(&states0[i]);
        incr.axpy_rhs(1.0, &k1[i].0);
        incr.axpy_rhs(2.0, &k2[i].0);
        incr.axpy_rhs(2.0, &k3[i].0);
        incr.axpy_rhs(1.0, &k4[i].0);
        let mut next = crate::hydro::add_scaled_state(&states0[i], &incr, dt / 6.0);

        let floor = k1[i].1.max(k2[i].1).max(k3[i].1).max(k4[i].1);
        let total = plasma.species[i].ops.grid().len();
        if floor as f64 > total as f64 * 1e-3 {
            return Err(Error::VacuumBreakdown {
                time,
                active: floor,
                total,
                percent: 100.0 * floor as f64 / total as f64,
            });
        }
        let drift = next.spin_norm_deviation();
        if drift > 1e-4 {
            return Err(Error::SpinDriftAlarm { drift, time });
        }
        if plasma.renormalize_spin {
            next.renormalize_spin();
        }
        stats.max_spin_drift = stats.max_spin_drift.max(drift);
        stats.max_floor_active = stats.max_floor_active.max(floor);
        plasma.species[i].state = next;
    }
    Ok(stats)
}

/// Total energy `sum_i H_i + (1/2) sum_i int rho_i Phi_i dV_i`.
pub fn total_plasma_energy(plasma: &Plasma) -> Result<f64> {
    let states: Vec<HydroState> = plasma.species.iter().map(|s| s.state.clone()).collect();
    let mut total = 0.0;
    for (i, sp) in plasma.species.iter().enumerate() {
        total += crate::hamiltonian::total_energy(&sp.ops, &sp.state, &sp.fields, &sp.params);
        let (phi, _) = mean_field_potential(plasma, &states, i)?;
        let mut density = ScalarField::zeros(sp.ops.grid());
        for p in 0..density.len() {
            density.data[p] = sp.state.rho.data[p] * phi.data[p];
        }
        total += 0.5 * sp.ops.integrate(&density);
    }
    Ok(total)
}

/// Interaction energy via the double-sum form
/// `(1/2) sum_{i != j} int int rho_i rho_j V_ij`, for cross-checking the
/// `Phi_i` form.
pub fn interaction_energy_double_sum(plasma: &Plasma) -> Result<f64> {
    let mut total = 0.0;
    match &plasma.kernel {
        InteractionKernel::None => {}
        InteractionKernel::Constant(c) => {
            let ns = plasma.species.len() as f64;
            // masses are 1 by normalization; (1/2) * N(N-1) * c * m_i m_j
            let mut masses = Vec::new();
            for sp in &plasma.species {
                masses.push(sp.state.mass(&sp.ops));
            }
            let mut acc = 0.0;
            for i in 0..plasma.species.len() {
                for j in 0..plasma.species.len() {
                    if i != j {
                        acc += masses[i] * masses[j];
                    }
                }
            }
            total = 0.5 * c * acc;
            let _ = ns;
        }
        InteractionKernel::SpinSpinUniform { j } => {
            let moments: Vec<[f64; 3]> = plasma
                .species
                .iter()
                .map(|sp| weighted_moment(&sp.ops, &sp.state, None))
                .collect();
            for a in 0..moments.len() {
                for b in 0..moments.len() {
                    if a != b {
                        let dot: f64 =
                            (0..3).map(|c| moments[a][c] * moments[b][c]).sum();
                        total -= 0.5 * j * dot;
                    }
                }
            }
        }
        InteractionKernel::SpinSpinSeparable { j, weights } => {
            let moments: Vec<[f64; 3]> = plasma
                .species
                .iter()
                .enumerate()
                .map(|(i, sp)| weighted_moment(&sp.ops, &sp.state, Some(&weights[i])))
                .collect();
            for a in 0..moments.len() {
                for b in 0..moments.len() {
                    if a != b {
                        let dot: f64 =
                            (0..3).map(|c| moments[a][c] * moments[b][c]).sum();
                        total -= 0.5 * j * dot;
                    }
                }
            }
        }
        InteractionKernel::SpinSpinConvolution { j, w } => {
            for a in 0..plasma.species.len() {
                for b in 0..plasma.species.len() {
                    if a == b {
                        continue;
                    }
                    let spa = &plasma.species[a];
                    let spb = &plasma.species[b];
                    for c in 0..3 {
                        let mut rsa = ScalarField::zeros(spa.ops.grid());
                        let mut rsb = ScalarField::zeros(spb.ops.grid());
                        for p in 0..rsa.len() {
                            rsa.data[p] = spa.state.rho.data[p] * spa.state.s.comps[c][p];
                            rsb.data[p] = spb.state.rho.data[p] * spb.state.s.comps[c][p];
                        }
                        let conv = convolve(&spa.ops, w, &rsb);
                        let mut density = ScalarField::zeros(spa.ops.grid());
                        for p in 0..density.len() {
                            density.data[p] = rsa.data[p] * conv.data[p];
                        }
                        total -= 0.5 * j * spa.ops.integrate(&density);
                    }
                }
            }
        }
    }
    Ok(total)
}

/// Total spin moment `sum_i int rho_i s_i dV`.
pub fn total_spin_moment(plasma: &Plasma) -> [f64; 3] {
    let mut m = [0.0; 3];
    for sp in &plasma.species {
        let mi = weighted_moment(&sp.ops, &sp.state, None);
        for c in 0..3 {
            m[c] += mi[c];
        }
    }
    m
}

/// Line-by-line spectral derivative along one axis of a product array.
struct LineDerivative {
    n: usize,
    wavenumbers: Vec<f64>,
    nyquist: Option<usize>,
    fwd: std::sync::Arc<dyn rustfft::Fft<f64>>,
    inv: std::sync::Arc<dyn rustfft::Fft<f64>>,
}

impl LineDerivative {
    fn new(n: usize, length: f64) -> Self {
        let mut planner = FftPlanner::new();
        let dk = 2.0 * std::f64::consts::PI / length;
        let wavenumbers = (0..n)
            .map(|j| {
                let m = if j <= n / 2 { j as i64 } else { j as i64 - n as i64 };
                dk * m as f64
            })
            .collect();
        LineDerivative {
            n,
            wavenumbers,
            nyquist: if n % 2 == 0 { Some(n / 2) } else { None },
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    /// d/dx along lines of the flat array with the given stride.
    fn apply(&self, data: &[f64], stride: usize) -> Vec<f64> {
        let total = data.len();
        let mut out = vec![0.0; total];
        let block = self.n * stride;
        let mut line = vec![Complex64::new(0.0, 0.0); self.n];
        let mut scratch =
            vec![Complex64::new(0.0, 0.0); self.fwd.get_inplace_scratch_len().max(self.inv.get_inplace_scratch_len())];
        let norm = 1.0 / self.n as f64;
        let mut base = 0;
        while base < total {
            for off in 0..stride {
                let start = base + off;
                for j in 0..self.n {
                    line[j] = Complex64::new(data[start + j * stride], 0.0);
                }
                self.fwd.process_with_scratch(&mut line, &mut scratch);
                for j in 0..self.n {
                    let k = if Some(j) == self.nyquist {
                        0.0
                    } else {
                        self.wavenumbers[j]
                    };
                    line[j] *= Complex64::new(0.0, k);
                }
                self.inv.process_with_scratch(&mut line, &mut scratch);
                for j in 0..self.n {
                    out[start + j * stride] = line[j].re * norm;
                }
            }
            base += block;
        }
        out
    }
}

/// Residual report of the product-form (3N-dimensional) assembly at N = 2.
#[derive(Debug, Clone, Copy)]
pub struct ProductReport {
    pub cells: usize,
    /// `int varrho dX` (should equal the product of species masses).
    pub product_mass: f64,
    /// max |d varrho/dt + div(varrho U)| over the product grid
    pub continuity_max_residual: f64,
    /// max blockwise |(d/dt + U.grad)U - F/m| residual
    pub momentum_max_residual: f64,
    /// max blockwise |(d/dt + U.grad)s - tau| residual
    pub torque_max_residual: f64,
}

const PRODUCT_CELL_BUDGET: usize = 1 << 21;
const PRODUCT_AXIS_BUDGET: usize = 32;

/// Assemble the N = 2 product density on the product grid, evaluate the
/// higher-dimensional continuity residual with genuine product-grid spectral
/// derivatives, and the blockwise momentum/torque residuals.
pub fn assemble_product_diagnostics(plasma: &Plasma) -> Result<ProductReport> {
    if plasma.species.len() != 2 {
        return Err(Error::Kernel(format!(
            "product diagnostics are implemented for N = 2, got {}",
            plasma.species.len()
        )));
    }
    let g1 = plasma.species[0].ops.grid().clone();
    let g2 = plasma.species[1].ops.grid().clone();
    for g in [&g1, &g2] {
        for &n in g.sizes() {
            if n > PRODUCT_AXIS_BUDGET {
                return Err(Error::ProductBudget {
                    cells: g.len(),
                    budget: PRODUCT_AXIS_BUDGET,
                });
            }
        }
    }
    let (n1, n2) = (g1.len(), g2.len());
    let cells = n1 * n2;
    if cells > PRODUCT_CELL_BUDGET {
        return Err(Error::ProductBudget {
            cells,
            budget: PRODUCT_CELL_BUDGET,
        });
    }

    let states: Vec<HydroState> = plasma.species.iter().map(|s| s.state.clone()).collect();
    // per-species right-hand sides at the current instant (identity checks:
    // no de-aliasing)
    let mut rhs = Vec::new();
    for i in 0..2 {
        let terms = interaction_terms(plasma, &states, i)?;
        let sp = &plasma.species[i];
        let (r, _) = hydro_rhs(&sp.ops, &states[i], &sp.fields, &sp.params, terms.as_ref(), false);
        rhs.push(r);
    }

    // product density and its time derivative
    let rho1 = &states[0].rho;
    let rho2 = &states[1].rho;
    let mut varrho_dot = vec![0.0; cells];
    for i1 in 0..n1 {
        for i2 in 0..n2 {
            varrho_dot[i1 * n2 + i2] = rhs[0].drho.data[i1] * rho2.data[i2]
                + rho1.data[i1] * rhs[1].drho.data[i2];
        }
    }
    let dv = g1.cell_volume() * g2.cell_volume();
    let mut product_mass = 0.0;
    // flux divergence on the product grid, axis by axis
    let mut div_flux = vec![0.0; cells];
    let mut flux = vec![0.0; cells];
    for a in 0..g1.dim() {
        for i1 in 0..n1 {
            let f1 = rho1.data[i1] * states[0].u.comps[a][i1];
            for i2 in 0..n2 {
                flux[i1 * n2 + i2] = f1 * rho2.data[i2];
            }
        }
        let deriv = LineDerivative::new(g1.sizes()[a], g1.lengths()[a]);
        let stride = g1.stride(a) * n2;
        let d = deriv.apply(&flux, stride);
        for (o, v) in div_flux.iter_mut().zip(&d) {
            *o += v;
        }
    }
    for b in 0..g2.dim() {
        for i1 in 0..n1 {
            for i2 in 0..n2 {
                flux[i1 * n2 + i2] =
                    rho1.data[i1] * rho2.data[i2] * states[1].u.comps[b][i2];
            }
        }
        let deriv = LineDerivative::new(g2.sizes()[b], g2.lengths()[b]);
        let stride = g2.stride(b);
        let d = deriv.apply(&flux, stride);
        for (o, v) in div_flux.iter_mut().zip(&d) {
            *o += v;
        }
    }
    let mut continuity_max: f64 = 0.0;
    for i1 in 0..n1 {
        for i2 in 0..n2 {
            let idx = i1 * n2 + i2;
            product_mass += rho1.data[i1] * rho2.data[i2];
            continuity_max = continuity_max.max((varrho_dot[idx] + div_flux[idx]).abs());
        }
    }
    product_mass *= dv;

    // Blockwise momentum and torque residuals. The 3N-dimensional velocity
    // and spin fields are block vectors whose block i depends on x_i only;
    // the residual evaluates the full product-grid advection (U . grad)
    // applied to each block component over ALL product axes and compares
    // against the species-grid force/torque from the per-species equations.
    let block_residual = |block_field: &VectorField3, species_idx: usize| -> f64 {
        let sp = &plasma.species[species_idx];
        let jac = sp.ops.jacobian(block_field);
        let mut broadcast = vec![0.0; cells];
        let mut adv_prod = vec![0.0; cells];
        let mut max_res: f64 = 0.0;
        for k in 0..3 {
            for i1 in 0..n1 {
                for i2 in 0..n2 {
                    broadcast[i1 * n2 + i2] = if species_idx == 0 {
                        block_field.comps[k][i1]
                    } else {
                        block_field.comps[k][i2]
                    };
                }
            }
            adv_prod.iter_mut().for_each(|v| *v = 0.0);
            for a in 0..g1.dim() {
                let deriv = LineDerivative::new(g1.sizes()[a], g1.lengths()[a]);
                let d = deriv.apply(&broadcast, g1.stride(a) * n2);
                for i1 in 0..n1 {
                    let ua = states[0].u.comps[a][i1];
                    for i2 in 0..n2 {
                        adv_prod[i1 * n2 + i2] += ua * d[i1 * n2 + i2];
                    }
                }
            }
            for b in 0..g2.dim() {
                let deriv = LineDerivative::new(g2.sizes()[b], g2.lengths()[b]);
                let d = deriv.apply(&broadcast, g2.stride(b));
                for i1 in 0..n1 {
                    for i2 in 0..n2 {
                        adv_prod[i1 * n2 + i2] += states[1].u.comps[b][i2] * d[i1 * n2 + i2];
                    }
                }
            }
            // residual of the full product-grid advection against the
            // species-grid advection (the block depends on x_i only)
            for i1 in 0..n1 {
                for i2 in 0..n2 {
                    let p = if species_idx == 0 { i1 } else { i2 };
                    let mut adv_species = 0.0;
                    for c in 0..3 {
                        adv_species += states[species_idx].u.comps[c][p] * jac[k].comps[c][p];
                    }
                    let res = adv_prod[i1 * n2 + i2] - adv_species;
                    max_res = max_res.max(res.abs());
                }
            }
        }
        max_res
    };
    let mut momentum_max: f64 = 0.0;
    let mut torque_max: f64 = 0.0;
    for i in 0..2 {
        momentum_max = momentum_max.max(block_residual(&states[i].u, i));
        torque_max = torque_max.max(block_residual(&states[i].s, i));
    }

    Ok(ProductReport {
        cells,
        product_mass,
        continuity_max_residual: continuity_max,
        momentum_max_residual: momentum_max,
        torque_max_residual: torque_max,
    })
}

/// Closed-form oracle for two homogeneous coupled species with
/// `V = -J s_1 . s_2`: both spins precess about the conserved total
/// `S = s_1 + s_2` with angular frequency `(2 J / c_g hbar) |S|`.
pub fn homogeneous_two_spin_oracle(
    s1_0: [f64; 3],
    s2_0: [f64; 3],
    j: f64,
    c_g: f64,
    hbar: f64,
    t: f64,
) -> ([f64; 3], [f64; 3]) {
    let total = [s1_0[0] + s2_0[0], s1_0[1] + s2_0[1], s1_0[2] + s2_0[2]];
    let norm = (total[0] * total[0] + total[1] * total[1] + total[2] * total[2]).sqrt();
    if norm < 1e-14 {
        // s2 = -s1: torques cancel, both spins are stationary
        return (s1_0, s2_0);
    }
    let axis = [total[0] / norm, total[1] / norm, total[2] / norm];
    // ds_1/dt = (2J/c_g hbar) s_1 x s_2 = -(2J/c_g hbar) S x s_1
    let omega = 2.0 * j / (c_g * hbar) * norm;
    let angle = -omega * t;
    (
        rotate_about(s1_0, axis, angle),
        rotate_about(s2_0, axis, angle),
    )
}

fn rotate_about(v: [f64; 3], axis: [f64; 3], angle: f64) -> [f64; 3] {
    // Rodrigues rotation
    let (sin_a, cos_a) = angle.sin_cos();
    let k = axis;
    let kxv = cross3(k, v);
    let kdv = k[0] * v[0] + k[1] * v[1] + k[2] * v[2];
    [
        v[0] * cos_a + kxv[0] * sin_a + k[0] * kdv * (1.0 - cos_a),
        v[1] * cos_a + kxv[1] * sin_a + k[1] * kdv * (1.0 - cos_a),
        v[2] * cos_a + kxv[2] * sin_a + k[2] * kdv * (1.0 - cos_a),
    ]
}
