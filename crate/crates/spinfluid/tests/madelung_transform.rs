//! Oracle tests for the forward/inverse Madelung transform and the derived
//! quantum/spin quantities.

use num_complex::Complex64;
use spinfluid::identities::random_identity_spinor;
use spinfluid::madelung::{
    forward_transform, quantum_potential, reconstruct_spinor, spin_helicity, spin_stress,
    spin_stress_angles, spin_velocity,
};
use spinfluid::pauli::gaussian_packet;
use spinfluid::rng::CounterRng;
use spinfluid::{
    ComplexField, FieldConfig, Grid, HydroState, PhysParams, ScalarField, SpectralOps,
    SpinorField, VectorField3,
};
use std::f64::consts::PI;

/// Independent pointwise oracle for the Madelung variables: 4th-order
/// finite differences of the analytic spinor at the oracle's own step size
/// (no spectral machinery anywhere in this path).
fn fd_transform_oracle(
    grid: &Grid,
    spec: &spinfluid::identities::SpinorSpec,
    params: &PhysParams,
) -> (ScalarField, VectorField3, VectorField3) {
    let n = grid.len();
    let delta = 1e-3;
    let mut rho = ScalarField::zeros(grid);
    let mut u = VectorField3::zeros(grid);
    let mut s = VectorField3::zeros(grid);
    let fd4 = |x: [f64; 3], axis: usize| -> (Complex64, Complex64) {
        let sample = |off: f64| {
            let mut y = x;
            y[axis] += off * delta;
            spec.eval(y)
        };
        let (a1, a2) = sample(-2.0);
        let (b1, b2) = sample(-1.0);
        let (c1, c2) = sample(1.0);
        let (d1, d2) = sample(2.0);
        (
            (a1 - 8.0 * b1 + 8.0 * c1 - d1) / (12.0 * delta),
            (a2 - 8.0 * b2 + 8.0 * c2 - d2) / (12.0 * delta),
        )
    };
    for i in 0..n {
        let x = grid.coords(i);
        let (p1, p2) = spec.eval(x);
        let r = p1.norm_sqr() + p2.norm_sqr();
        rho.data[i] = r;
        for a in 0..grid.dim() {
            let (g1, g2) = fd4(x, a);
            let cur = p1.conj() * g1 + p2.conj() * g2;
            u.comps[a][i] = params.hbar / params.mass * cur.im / r;
        }
        let cross = p1.conj() * p2;
        s.comps[0][i] = 2.0 * cross.re / r;
        s.comps[1][i] = 2.0 * cross.im / r;
        s.comps[2][i] = (p1.norm_sqr() - p2.norm_sqr()) / r;
    }
    (rho, u, s)
}

#[test]
fn forward_transform_matches_fd_oracle() {
    let grid = Grid::line(64, 3.0).unwrap();
    let ops = SpectralOps::new(&grid);
    let params = PhysParams::natural();
    let mut spec = spinfluid::identities::SpinorSpec::new(&grid, &CounterRng::new(2024), 3);
    let psi = spec.sample_normalized(&ops);
    let state = forward_transform(&ops, &psi, &FieldConfig::free(), &params).unwrap();
    let (rho_o, u_o, s_o) = fd_transform_oracle(&grid, &spec, &params);
    let err_rho = spinfluid::field::rel_l2_scalar(&state.rho, &rho_o);
    let err_u = spinfluid::field::rel_l2_vector(&state.u, &u_o);
    let err_s = spinfluid::field::rel_l2_vector(&state.s, &s_o);
    assert!(err_rho < 1e-12, "rho vs oracle: {err_rho}");
    assert!(err_u < 1e-6, "u vs oracle: {err_u}");
    assert!(err_s < 1e-12, "s vs oracle: {err_s}");
}

#[test]
fn uniform_a_shifts_velocity() {
    let grid = Grid::line(32, 4.0).unwrap();
    let ops = SpectralOps::new(&grid);
    let params = PhysParams::natural();
    let v = grid.volume();
    let psi = SpinorField::new(
        ComplexField::from_fn(&grid, |_| Complex64::new(1.0 / v.sqrt(), 0.0)),
        ComplexField::zeros(&grid),
    );
    let fields = FieldConfig {
        a_mode: spinfluid::AMode::Uniform([0.7, 0.2, -0.1]),
        ..Default::default()
    };
    let state = forward_transform(&ops, &psi, &fields, &params).unwrap();
    for i in 0..grid.len() {
        let u = state.u.at(i);
        assert!((u[0] + 0.7).abs() < 1e-12);
        assert!((u[1] + 0.2).abs() < 1e-12);
        assert!((u[2] - 0.1).abs() < 1e-12);
    }
}

#[test]
fn round_trip_spin_up_gaussian_pointwise() {
    let l = 16.0;
    let grid = Grid::line(128, l).unwrap();
    let ops = SpectralOps::new(&grid);
    let params = PhysParams::natural();
    let fields = FieldConfig::free();
    // wide packet with a pedestal keeps the tail above the vacuum floor
    let psi = gaussian_packet(&ops, [l / 2.0, 0.0, 0.0], 1.2, [0.0; 3], [0.0, 0.0], 1e-5, false);
    let state = forward_transform(&ops, &psi, &fields, &params).unwrap();
    let back = reconstruct_spinor(&ops, &state, &fields, &params, 0).unwrap();
    // compare up to one constant global phase fixed by the anchor point
    let alpha = (psi.psi1.data[0] / back.psi1.data[0]).arg();
    let rot = Complex64::from_polar(1.0, alpha);
    let mut max_err: f64 = 0.0;
    for i in 0..grid.len() {
        max_err = max_err.max((back.psi1.data[i] * rot - psi.psi1.data[i]).norm());
        max_err = max_err.max((back.psi2.data[i] * rot - psi.psi2.data[i]).norm());
    }
    assert!(max_err < 1e-9, "round-trip pointwise error {max_err}");
}

#[test]
fn uniform_state_reconstructs_to_constant_spinor() {
    let grid = Grid::line(16, 4.0).unwrap();
    let ops = SpectralOps::new(&grid);
    let state = HydroState::uniform(&grid, [0.0, 0.0, 1.0]);
    let psi = reconstruct_spinor(&ops, &state, &FieldConfig::free(), &PhysParams::natural(), 0)
        .unwrap();
    let expected = 0.5; // sqrt(1/V), V = 4
    for i in 0..grid.len() {
        assert!((psi.psi1.data[i] - Complex64::new(expected, 0.0)).norm() < 1e-12);
        assert!(psi.psi2.data[i].norm() < 1e-14);
    }
}

#[test]
fn round_trip_random_texture() {
    let grid = Grid::line(64, 3.0).unwrap();
    let ops = SpectralOps::new(&grid);
    let params = PhysParams::natural();
    let fields = FieldConfig::free();
    let psi = random_identity_spinor(&ops, &CounterRng::new(99));
    let state = forward_transform(&ops, &psi, &fields, &params).unwrap();
    let back = reconstruct_spinor(&ops, &state, &fields, &params, 0).unwrap();
    let state2 = forward_transform(&ops, &back, &fields, &params).unwrap();
    // hydro -> spinor -> hydro is the identity
    assert!(spinfluid::field::rel_l2_scalar(&state2.rho, &state.rho) < 1e-12);
    assert!(spinfluid::field::rel_l2_vector(&state2.u, &state.u) < 1e-8);
    assert!(spinfluid::field::rel_l2_vector(&state2.s, &state.s) < 1e-12);
    // spinor -> hydro -> spinor is the identity up to one constant phase
    let alpha = (psi.psi1.data[0] / back.psi1.data[0]).arg();
    let rot = Complex64::from_polar(1.0, alpha);
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..grid.len() {
        num += (back.psi1.data[i] * rot - psi.psi1.data[i]).norm_sqr();
        num += (back.psi2.data[i] * rot - psi.psi2.data[i]).norm_sqr();
        den += psi.psi1.data[i].norm_sqr() + psi.psi2.data[i].norm_sqr();
    }
    let rel = (num / den).sqrt();
    assert!(rel < 1e-8, "spinor round-trip relative L2 error {rel}");
}

#[test]
fn round_trip_with_winding() {
    // plane-wave phase with unit circulation around the box
    let l = 4.0;
    let grid = Grid::line(64, l).unwrap();
    let ops = SpectralOps::new(&grid);
    let params = PhysParams::natural();
    let fields = FieldConfig::free();
    let k = 2.0 * PI / l;
    let eta0: f64 = 1.0;
    let mut rho = ScalarField::from_fn(&grid, |x| 1.0 + 0.2 * (k * x[0]).cos());
    let mass = ops.integrate(&rho);
    rho.scale(1.0 / mass);
    let u = VectorField3::constant(&grid, [k, 0.0, 0.0]); // winding 1: m u L = 2 pi hbar
    let s = VectorField3::constant(&grid, [eta0.sin(), 0.0, eta0.cos()]);
    let state = HydroState { rho, u, s };
    let psi = reconstruct_spinor(&ops, &state, &fields, &params, 0).unwrap();
    let state2 = forward_transform(&ops, &psi, &fields, &params).unwrap();
    assert!(spinfluid::field::rel_l2_scalar(&state2.rho, &state.rho) < 1e-12);
    assert!(spinfluid::field::rel_l2_vector(&state2.u, &state.u) < 1e-10);
    assert!(spinfluid::field::rel_l2_vector(&state2.s, &state.s) < 1e-12);
}

#[test]
fn non_quantized_circulation_is_an_obstruction() {
    let grid = Grid::line(32, 4.0).unwrap();
    let ops = SpectralOps::new(&grid);
    let state = HydroState {
        rho: ScalarField::constant(&grid, 0.25),
        u: VectorField3::constant(&grid, [0.77, 0.0, 0.0]), // not 2 pi n / L
        s: VectorField3::constant(&grid, [0.0, 0.0, 1.0]),
    };
    let err =
        reconstruct_spinor(&ops, &state, &FieldConfig::free(), &PhysParams::natural(), 0)
            .unwrap_err();
    assert!(err.to_string().contains("circulation"), "{err}");
}

#[test]
fn quantum_potential_periodized_gaussian_oracle() {
    // Q of a Gaussian profile: -(hbar^2/2m)(x^2/(4 sigma^4) - 1/(2 sigma^2))
    let l = 20.0;
    let sigma = 1.0;
    let grid = Grid::line(256, l).unwrap();
    let ops = SpectralOps::new(&grid);
    let params = PhysParams::natural();
    let rho = ScalarField::from_fn(&grid, |x| {
        let mut v = 0.0;
        for img in -2i64..=2 {
            let d = x[0] - l / 2.0 + img as f64 * l;
            v += (-d * d / (2.0 * sigma * sigma)).exp();
        }
        v / (2.0 * PI * sigma * sigma).sqrt()
    });
    let q = quantum_potential(&ops, &rho, &params).unwrap();
    for i in 0..grid.len() {
        let x = grid.coords(i)[0] - l / 2.0;
        if x.abs() < 3.0 * sigma {
            let exact = -0.5 * (x * x / (4.0 * sigma.powi(4)) - 1.0 / (2.0 * sigma * sigma));
            assert!(
                (q.data[i] - exact).abs() < 1e-6,
                "Q({x}) = {} vs {exact}",
                q.data[i]
            );
        }
    }
}

#[test]
fn quantum_potential_linearization_oracle() {
    // rho = (1 + eps cos(kx))/V: Q = (hbar^2/2m)(eps/2) k^2 cos(kx) + O(eps^2)
    let l = 2.0 * PI;
    let grid = Grid::line(64, l).unwrap();
    let ops = SpectralOps::new(&grid);
    let params = PhysParams::natural();
    let eps = 1e-6;
    let k = 2.0 * PI / l;
    let rho = ScalarField::from_fn(&grid, |x| (1.0 + eps * (k * x[0]).cos()) / l);
    let q = quantum_potential(&ops, &rho, &params).unwrap();
    for i in 0..grid.len() {
        let x = grid.coords(i)[0];
        let expected = 0.5 * (eps / 2.0) * k * k * (k * x).cos();
        assert!(
            (q.data[i] - expected).abs() < 1e-6 * eps.max(1e-9) + 1e-12,
            "{} vs {expected}",
            q.data[i]
        );
    }
}

#[test]
fn spin_stress_helical_texture() {
    // s = (cos kz, sin kz, 0): Pi^zz = hbar^2 rho k^2 / 4m, others 0
    let grid = Grid::new(&[4, 4, 64], &[1.0, 1.0, 4.0]).unwrap();
    let ops = SpectralOps::new(&grid);
    let params = PhysParams::natural();
    let k = 2.0 * PI / 4.0;
    let rho = ScalarField::constant(&grid, 0.3);
    let s = VectorField3::from_fn(&grid, |x| [(k * x[2]).cos(), (k * x[2]).sin(), 0.0]);
    let pi = spin_stress(&ops, &rho, &s, &params);
    let expected = 0.3 * k * k / 4.0;
    for i in 0..grid.len() {
        assert!((pi.comp(2, 2)[i] - expected).abs() < 1e-10);
        assert!(pi.comp(0, 0)[i].abs() < 1e-12);
        assert!(pi.comp(0, 1)[i].abs() < 1e-12);
        assert!(pi.comp(0, 2)[i].abs() < 1e-12);
        assert!(pi.comp(1, 2)[i].abs() < 1e-12);
    }
}

#[test]
fn spin_stress_dual_formulas_agree() {
    let grid = Grid::square(64, 3.0).unwrap();
    let ops = SpectralOps::new(&grid);
    let params = PhysParams::natural();
    let psi = spinfluid::identities::smooth_identity_spinor(&ops, &CounterRng::new(7));
    let state = forward_transform(&ops, &psi, &FieldConfig::free(), &params).unwrap();
    let pi_s = spin_stress(&ops, &state.rho, &state.s, &params);
    let (pi_a, mask) = spin_stress_angles(&ops, &state.rho, &state.s, &params, 1e-6);
    let scale = pi_s.max_abs();
    for slot in 0..6 {
        for i in 0..grid.len() {
            if mask[i] {
                continue;
            }
            let d = (pi_s.comps[slot][i] - pi_a.comps[slot][i]).abs() / scale;
            assert!(d < 1e-8, "slot {slot}: relative deviation {d}");
        }
    }
    // symmetry is structural: components are stored once per (i, j) pair
    assert_eq!(pi_s.comp(0, 1), pi_s.comp(1, 0));
}

#[test]
fn spin_velocity_helical_analytic() {
    let grid = Grid::new(&[4, 4, 64], &[1.0, 1.0, 4.0]).unwrap();
    let ops = SpectralOps::new(&grid);
    let params = PhysParams::natural();
    let k = 2.0 * PI / 4.0;
    let rho = ScalarField::constant(&grid, 1.0 / grid.volume());
    let s = VectorField3::from_fn(&grid, |x| [(k * x[2]).cos(), (k * x[2]).sin(), 0.0]);
    let v = spin_velocity(&ops, &rho, &s, &params).unwrap();
    // v_s = (c_g hbar k / 2m)(-cos kz, -sin kz, 0) for curl s = -k s
    for i in 0..grid.len() {
        let x = grid.coords(i)[2];
        let expected = [-0.5 * k * (k * x).cos(), -0.5 * k * (k * x).sin(), 0.0];
        let got = v.at(i);
        for c in 0..3 {
            assert!(
                (got[c] - expected[c]).abs() < 1e-10,
                "component {c}: {} vs {}",
                got[c],
                expected[c]
            );
        }
    }
}

#[test]
fn rho_spin_velocity_is_divergence_free() {
    let grid = Grid::square(64, 3.0).unwrap();
    let ops = SpectralOps::new(&grid);
    let params = PhysParams::natural();
    let psi = spinfluid::identities::smooth_identity_spinor(&ops, &CounterRng::new(13));
    let state = forward_transform(&ops, &psi, &FieldConfig::free(), &params).unwrap();
    let v = spin_velocity(&ops, &state.rho, &state.s, &params).unwrap();
    let mut rho_v = VectorField3::zeros(&grid);
    for c in 0..3 {
        for i in 0..grid.len() {
            rho_v.comps[c][i] = state.rho.data[i] * v.comps[c][i];
        }
    }
    let div = ops.div(&rho_v);
    assert!(div.max_abs() < 1e-9, "max div(rho v_s) = {}", div.max_abs());
}

#[test]
fn helicity_examples() {
    let grid = Grid::new(&[4, 4, 64], &[1.0, 1.0, 4.0]).unwrap();
    let ops = SpectralOps::new(&grid);
    let k = 2.0 * PI / 4.0;
    // constant field
    let s_const = VectorField3::constant(&grid, [0.6, 0.0, 0.8]);
    assert!(spin_helicity(&ops, &s_const).max_abs() < 1e-12);
    // helix: h_s = k
    let s_helix = VectorField3::from_fn(&grid, |x| [(k * x[2]).cos(), (k * x[2]).sin(), 0.0]);
    let h = spin_helicity(&ops, &s_helix);
    for i in 0..grid.len() {
        assert!((h.data[i] + k).abs() < 1e-10 || (h.data[i] - k).abs() < 1e-10);
    }
    // gradient field s = grad z has zero helicity
    let s_grad = VectorField3::constant(&grid, [0.0, 0.0, 1.0]);
    assert!(spin_helicity(&ops, &s_grad).max_abs() < 1e-12);
}
