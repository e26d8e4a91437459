//! Split-step time integration of the two-component Pauli equation
//! `i hbar dPsi/dt = H Psi`, with
//! `H = (1/2m)(-i hbar grad - qA)^2 + q Phi - (q hbar / 2m) sigma . B`.
//!
//! One step is a Strang splitting local(dt/2) - kinetic(dt) - local(dt/2):
//! the local operator is a closed-form 2x2 Pauli-matrix exponential per
//! point, the kinetic operator is diagonal in spectral space (a uniform A
//! enters as a wavenumber shift). Each factor is unitary, so the norm is
//! preserved to round-off.

use crate::em::FieldConfig;
use crate::error::Result;

use crate::grid::Grid;
use crate::madelung::SpinorField;
use crate::params::PhysParams;
use crate::spectral::SpectralOps;
use num_complex::Complex64;

/// `dt * hbar * k_max^2 / 2m`; keep it below pi for a well-resolved phase
/// advance of the fastest mode.
pub fn cfl_number(grid: &Grid, params: &PhysParams, dt: f64) -> f64 {
    let kmax = grid.k_max();
    dt * params.hbar * kmax * kmax / (2.0 * params.mass)
}

/// Apply `exp(i a . sigma)` to the spinor at one point:
/// `exp(i a . sigma) = cos|a| I + i sin|a| (a_hat . sigma)`,
/// with a series fallback for small |a|.
#[inline]
fn pauli_exp(a: [f64; 3], p1: Complex64, p2: Complex64) -> (Complex64, Complex64) {
    let norm = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    let (c, snc) = if norm < 1e-8 {
        // cos|a| and sin|a|/|a| to O(|a|^4)
        let n2 = norm * norm;
        (1.0 - 0.5 * n2, 1.0 - n2 / 6.0)
    } else {
        (norm.cos(), norm.sin() / norm)
    };
    // i * snc * (a . sigma) acting on (p1, p2):
    // (a.sigma) psi = (a3 p1 + (a1 - i a2) p2, (a1 + i a2) p1 - a3 p2)
    let am = Complex64::new(a[0], -a[1]);
    let ap = Complex64::new(a[0], a[1]);
    let i = Complex64::new(0.0, 1.0);
    let q1 = c * p1 + i * snc * (a[2] * p1 + am * p2);
    let q2 = c * p2 + i * snc * (ap * p1 - a[2] * p2);
    (q1, q2)
}

/// Apply the local (potential + Zeeman) half-step `exp(-i tau/hbar (q Phi I
/// - (q hbar/2m) sigma.B))` in place, where `tau` is the substep length.
fn local_step(psi: &mut SpinorField, fields: &FieldConfig, params: &PhysParams, tau: f64) {
    let n = psi.psi1.len();
    let (hbar, m, q) = (params.hbar, params.mass, params.charge);
    let phi = fields.phi.as_ref();
    let b = fields.b_field.as_ref();
    for i in 0..n {
        let mut p1 = psi.psi1.data[i];
        let mut p2 = psi.psi2.data[i];
        if let Some(b) = b {
            let bv = b.at(i);
            let s = q * tau / (2.0 * m);
            (p1, p2) = pauli_exp([s * bv[0], s * bv[1], s * bv[2]], p1, p2);
        }
        if let Some(phi) = phi {
            let phase = Complex64::from_polar(1.0, -q * phi.data[i] * tau / hbar);
            p1 *= phase;
            p2 *= phase;
        }
        psi.psi1.data[i] = p1;
        psi.psi2.data[i] = p2;
    }
}

/// Apply the full kinetic step `exp(-i dt |hbar k - qA|^2 / (2 m hbar))`.
fn kinetic_step(ops: &SpectralOps, psi: &mut SpinorField, fields: &FieldConfig, params: &PhysParams, dt: f64) {
    let grid = ops.grid().clone();
    let (hbar, m, q) = (params.hbar, params.mass, params.charge);
    let a = fields.uniform_a();
    let dim = grid.dim();
    let sizes = grid.sizes().to_vec();
    let wavenumbers: Vec<Vec<f64>> = (0..dim).map(|ax| grid.wavenumbers(ax)).collect();
    let mut phases = vec![Complex64::new(1.0, 0.0); grid.len()];
    let mut ijk = vec![0usize; dim];
    for (i, ph) in phases.iter_mut().enumerate() {
        let mut rem = i;
        for ax in (0..dim).rev() {
            ijk[ax] = rem % sizes[ax];
            rem /= sizes[ax];
        }
        let mut p2 = 0.0;
        for ax in 0..dim {
            let pk = hbar * wavenumbers[ax][ijk[ax]] - q * a[ax];
            p2 += pk * pk;
        }
        // components of A along absent axes contribute a constant |qA|^2
        for ax in dim..3 {
            let pk = q * a[ax];
            p2 += pk * pk;
        }
        *ph = Complex64::from_polar(1.0, -dt * p2 / (2.0 * m * hbar));
    }
    for comp in [&mut psi.psi1, &mut psi.psi2] {
        ops.fft(&mut comp.data);
        for (z, ph) in comp.data.iter_mut().zip(&phases) {
            *z *= ph;
        }
        ops.ifft(&mut comp.data);
    }
}

/// One Strang-splitting step of the Pauli equation. Step with `-dt` to
/// reverse.
pub fn step_pauli(
    ops: &SpectralOps,
    psi: &SpinorField,
    fields: &FieldConfig,
    params: &PhysParams,
    dt: f64,
) -> Result<SpinorField> {
    fields.validate(ops.grid())?;
    let mut out = psi.clone();
    local_step(&mut out, fields, params, 0.5 * dt);
    kinetic_step(ops, &mut out, fields, params, dt);
    local_step(&mut out, fields, params, 0.5 * dt);
    Ok(out)
}

/// Expectation value of the Pauli Hamiltonian, `integral(Psi^dag H Psi dV)`.
/// Returns (real part, |imaginary part|); the imaginary part is a round-off
/// diagnostic.
pub fn pauli_energy_full(
    ops: &SpectralOps,
    psi: &SpinorField,
    fields: &FieldConfig,
    params: &PhysParams,
) -> (f64, f64) {
    let grid = ops.grid().clone();
    let (hbar, m, q) = (params.hbar, params.mass, params.charge);
    let a = fields.uniform_a();
    let a_sq: f64 = a.iter().map(|v| v * v).sum();
    let mut acc = Complex64::new(0.0, 0.0);
    for (comp, other, sign) in [(&psi.psi1, &psi.psi2, 1.0), (&psi.psi2, &psi.psi1, -1.0)] {
        // kinetic: (-hbar^2 lap + 2 i hbar q A . grad + q^2 A^2) / 2m
        let lap = ops.lap_complex(comp);
        let grads = ops.grad_complex(comp);
        for i in 0..grid.len() {
            let mut h = -hbar * hbar * lap.data[i];
            for c in 0..3 {
                h += Complex64::new(0.0, 2.0 * hbar * q * a[c]) * grads[c].data[i];
            }
            h += q * q * a_sq * comp.data[i];
            h /= 2.0 * m;
            if let Some(phi) = &fields.phi {
                h += q * phi.data[i] * comp.data[i];
            }
            if let Some(b) = &fields.b_field {
                // -(q hbar / 2m) (sigma . B) Psi, rows of the 2x2 matrix
                let bv = b.at(i);
                let zc = q * hbar / (2.0 * m);
                let off = if sign > 0.0 {
                    Complex64::new(bv[0], -bv[1]) // B1 - i B2 acting on psi2
                } else {
                    Complex64::new(bv[0], bv[1]) // B1 + i B2 acting on psi1
                };
                h -= zc * (sign * bv[2] * comp.data[i] + off * other.data[i]);
            }
            acc += comp.data[i].conj() * h;
        }
    }
    let dv = grid.cell_volume();
    (acc.re * dv, (acc.im * dv).abs())
}

/// Real part of the Pauli energy (the imaginary residual is round-off).
pub fn pauli_energy(
    ops: &SpectralOps,
    psi: &SpinorField,
    fields: &FieldConfig,
    params: &PhysParams,
) -> f64 {
    pauli_energy_full(ops, psi, fields, params).0
}

/// Spin expectation `integral(rho s dV) = integral(Psi^dag sigma Psi dV)`.
pub fn spin_expectation(ops: &SpectralOps, psi: &SpinorField) -> [f64; 3] {
    let dv = ops.grid().cell_volume();
    let mut out = [0.0; 3];
    for i in 0..psi.psi1.len() {
        let cross = psi.psi1.data[i].conj() * psi.psi2.data[i];
        out[0] += 2.0 * cross.re;
        out[1] += 2.0 * cross.im;
        out[2] += psi.psi1.data[i].norm_sqr() - psi.psi2.data[i].norm_sqr();
    }
    [out[0] * dv, out[1] * dv, out[2] * dv]
}

/// Gaussian wave packet `psi ~ exp(-(x-x0)^2/(4 sigma^2) + i k.x)` with spin
/// direction given by polar angles `spin = [eta, phi]`, periodized over the
/// box, optionally on a small uniform pedestal (relative amplitude
/// `background`) that keeps the far tail above the vacuum floor. The
/// pedestal spinor is parallel to the packet spin (so s stays uniform), or
/// orthogonal to it when `orthogonal_background` is set. Normalized to 1.
#[allow(clippy::too_many_arguments)]
pub fn gaussian_packet(
    ops: &SpectralOps,
    center: [f64; 3],
    sigma: f64,
    k: [f64; 3],
    spin: [f64; 2],
    background: f64,
    orthogonal_background: bool,
) -> SpinorField {
    let grid = ops.grid().clone();
    let (eta_half, phi0) = (0.5 * spin[0], spin[1]);
    let chi = [
        Complex64::new(eta_half.cos(), 0.0),
        Complex64::from_polar(eta_half.sin(), phi0),
    ];
    let chi_perp = [
        Complex64::new(-eta_half.sin(), 0.0),
        Complex64::from_polar(eta_half.cos(), phi0),
    ];
    let pedestal = if orthogonal_background { chi_perp } else { chi };
    let mut psi1 = crate::field::ComplexField::zeros(&grid);
    let mut psi2 = crate::field::ComplexField::zeros(&grid);
    let images = 3i64; // periodization images per axis
    for i in 0..grid.len() {
        let x = grid.coords(i);
        let mut envelope = 0.0;
        // periodized Gaussian sum over lattice images
        let dim = grid.dim();
        let mut add = |dx: [f64; 3]| {
            let r2: f64 = dx.iter().map(|d| d * d).sum();
            envelope += (-r2 / (4.0 * sigma * sigma)).exp();
        };
        match dim {
            1 => {
                for n0 in -images..=images {
                    add([x[0] - center[0] + n0 as f64 * grid.lengths()[0], 0.0, 0.0]);
                }
            }
            2 => {
                for n0 in -images..=images {
                    for n1 in -images..=images {
                        add([
                            x[0] - center[0] + n0 as f64 * grid.lengths()[0],
                            x[1] - center[1] + n1 as f64 * grid.lengths()[1],
                            0.0,
                        ]);
                    }
                }
            }
            _ => {
                for n0 in -images..=images {
                    for n1 in -images..=images {
                        for n2 in -images..=images {
                            add([
                                x[0] - center[0] + n0 as f64 * grid.lengths()[0],
                                x[1] - center[1] + n1 as f64 * grid.lengths()[1],
                                x[2] - center[2] + n2 as f64 * grid.lengths()[2],
                            ]);
                        }
                    }
                }
            }
        }
        let carrier = Complex64::from_polar(1.0, k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
        let amp = envelope * carrier;
        psi1.data[i] = amp * chi[0] + background * pedestal[0];
        psi2.data[i] = amp * chi[1] + background * pedestal[1];
    }
    let mut psi = SpinorField::new(psi1, psi2);
    psi.normalize(ops);
    psi
}
