//! Oracle tests for the spectral differential operators: analytic
//! derivatives, an independent 4th-order finite-difference oracle, vector
//! identities, quadrature, Parseval consistency, and translation symmetry.

use spinfluid::rng::{band_limited_scalar, band_limited_vector, CounterRng};
use spinfluid::spectral::{curl, divergence, gradient, integrate, laplacian};
use spinfluid::{Grid, ScalarField, SpectralOps, VectorField3};
use std::f64::consts::PI;

/// 4th-order central finite difference along one axis, periodic.
fn fd4_derivative(f: &ScalarField, axis: usize) -> Vec<f64> {
    let grid = &f.grid;
    let n = grid.len();
    let h = grid.spacing(axis);
    let shift = |off: i64| -> ScalarField {
        let mut v = vec![0i64; grid.dim()];
        v[axis] = off;
        f.shifted(&v)
    };
    // note: shifted(+1) moves data forward, so its value at i is f(i-1)
    let fm1 = shift(1);
    let fm2 = shift(2);
    let fp1 = shift(-1);
    let fp2 = shift(-2);
    (0..n)
        .map(|i| (fm2.data[i] - 8.0 * fm1.data[i] + 8.0 * fp1.data[i] - fp2.data[i]) / (12.0 * h))
        .collect()
}

#[test]
fn gradient_matches_fd4_oracle_at_h4_order() {
    // random band-limited field; FD4 error should shrink ~16x per refinement
    let mut prev_err = f64::INFINITY;
    for &n in &[32usize, 64, 128] {
        let grid = Grid::line(n, 2.0).unwrap();
        let ops = SpectralOps::new(&grid);
        let f = band_limited_scalar(&grid, &CounterRng::new(11), 3, 1.0);
        let g = gradient(&ops, &f).unwrap();
        let fd = fd4_derivative(&f, 0);
        let mut err: f64 = 0.0;
        for i in 0..grid.len() {
            err = err.max((g.comps[0][i] - fd[i]).abs());
        }
        if prev_err.is_finite() {
            let ratio = prev_err / err;
            assert!(
                ratio > 10.0,
                "expected ~16x error reduction of the FD oracle, got {ratio:.2}"
            );
        }
        prev_err = err;
    }
    // at n=128 the residual is the oracle's own truncation, (h^4/30) f^(5)
    let h: f64 = 2.0 / 128.0;
    let k_band = 2.0 * PI * 3.0 / 2.0;
    let bound = h.powi(4) * k_band.powi(5) / 10.0;
    assert!(prev_err < bound, "FD4 vs spectral mismatch {prev_err} > {bound}");
}

#[test]
fn gradient_matches_fd4_oracle_2d() {
    let grid = Grid::new(&[48, 32], &[1.5, 2.5]).unwrap();
    let ops = SpectralOps::new(&grid);
    let f = band_limited_scalar(&grid, &CounterRng::new(5), 2, 1.0);
    let g = gradient(&ops, &f).unwrap();
    for axis in 0..2 {
        let fd = fd4_derivative(&f, axis);
        let h = grid.spacing(axis);
        let k_band = 2.0 * PI * 2.0 / grid.lengths()[axis];
        let tol = h.powi(4) * k_band.powi(5) * f.max_abs(); // O(h^4) oracle truncation
        for i in 0..grid.len() {
            assert!(
                (g.comps[axis][i] - fd[i]).abs() < tol,
                "axis {axis}: {} vs {}",
                g.comps[axis][i],
                fd[i]
            );
        }
    }
    // components along the absent axis vanish identically
    assert_eq!(g.comps[2], vec![0.0; grid.len()]);
}

#[test]
fn laplacian_of_sine_analytic() {
    let l = 7.0;
    let grid = Grid::line(64, l).unwrap();
    let ops = SpectralOps::new(&grid);
    let k = 2.0 * PI / l;
    let f = ScalarField::from_fn(&grid, |x| (k * x[0]).sin());
    let lap = laplacian(&ops, &f).unwrap();
    for i in 0..grid.len() {
        let x = grid.coords(i)[0];
        assert!((lap.data[i] + k * k * (k * x).sin()).abs() < 1e-11);
    }
}

#[test]
fn divergence_of_helical_field_vanishes() {
    // s = (cos kz, sin kz, 0) on a thin 3D grid: divergence-free
    let grid = Grid::new(&[4, 4, 48], &[1.0, 1.0, 3.0]).unwrap();
    let ops = SpectralOps::new(&grid);
    let k = 2.0 * PI / 3.0;
    let v = VectorField3::from_fn(&grid, |x| [(k * x[2]).cos(), (k * x[2]).sin(), 0.0]);
    let d = divergence(&ops, &v).unwrap();
    assert!(d.max_abs() < 1e-12);
}

#[test]
fn curl_of_gradient_vanishes() {
    let grid = Grid::new(&[24, 24, 24], &[2.0, 3.0, 1.5]).unwrap();
    let ops = SpectralOps::new(&grid);
    let f = band_limited_scalar(&grid, &CounterRng::new(17), 2, 1.0);
    let g = gradient(&ops, &f).unwrap();
    let c = curl(&ops, &g).unwrap();
    assert!(c.max_abs() < 1e-10, "max curl(grad f) = {}", c.max_abs());
}

#[test]
fn divergence_of_curl_vanishes() {
    let grid = Grid::new(&[24, 24, 24], &[2.0, 3.0, 1.5]).unwrap();
    let ops = SpectralOps::new(&grid);
    let v = band_limited_vector(&grid, &CounterRng::new(23), 2, 1.0);
    let c = curl(&ops, &v).unwrap();
    let d = divergence(&ops, &c).unwrap();
    assert!(d.max_abs() < 1e-10, "max div(curl v) = {}", d.max_abs());
}

#[test]
fn integrate_constant_gives_volume() {
    let grid = Grid::new(&[8, 16], &[2.0, 3.0]).unwrap();
    let ops = SpectralOps::new(&grid);
    let f = ScalarField::constant(&grid, 1.0);
    assert!((integrate(&ops, &f).unwrap() - 6.0).abs() < 1e-13);
}

#[test]
fn integrate_zero_mean_mode_vanishes() {
    let l = 5.0;
    let grid = Grid::line(64, l).unwrap();
    let ops = SpectralOps::new(&grid);
    let f = ScalarField::from_fn(&grid, |x| (2.0 * PI * x[0] / l).sin());
    assert!(integrate(&ops, &f).unwrap().abs() < 1e-13);
}

#[test]
fn integrate_periodized_gaussian_is_normalized() {
    let l = 16.0;
    let sigma = 0.5;
    let grid = Grid::line(64, l).unwrap();
    let ops = SpectralOps::new(&grid);
    let norm = 1.0 / (2.0 * PI * sigma * sigma).sqrt();
    let f = ScalarField::from_fn(&grid, |x| {
        let mut v = 0.0;
        for img in -3i64..=3 {
            let d = x[0] - l / 2.0 + img as f64 * l;
            v += norm * (-d * d / (2.0 * sigma * sigma)).exp();
        }
        v
    });
    assert!((integrate(&ops, &f).unwrap() - 1.0).abs() < 1e-8);
}

#[test]
fn parseval_consistency() {
    let grid = Grid::new(&[32, 32], &[2.0, 5.0]).unwrap();
    let ops = SpectralOps::new(&grid);
    let f = band_limited_scalar(&grid, &CounterRng::new(31), 3, 1.3);
    let sq = f.map(|v| v * v);
    let direct = ops.integrate(&sq);
    let spectral = ops.spectral_energy(&f);
    assert!(
        (direct - spectral).abs() / direct.abs() < 1e-10,
        "{direct} vs {spectral}"
    );
}

#[test]
fn operators_commute_with_lattice_translations() {
    let grid = Grid::new(&[32, 16], &[2.0, 1.0]).unwrap();
    let ops = SpectralOps::new(&grid);
    let f = band_limited_scalar(&grid, &CounterRng::new(41), 3, 1.0);
    let offset = [5i64, -3];
    let grad_then_shift = ops.grad(&f).shifted(&offset);
    let shift_then_grad = ops.grad(&f.shifted(&offset));
    for c in 0..3 {
        for i in 0..grid.len() {
            assert!(
                (grad_then_shift.comps[c][i] - shift_then_grad.comps[c][i]).abs() < 1e-11,
                "translation does not commute with gradient"
            );
        }
    }
    // integral is translation invariant
    assert!((ops.integrate(&f) - ops.integrate(&f.shifted(&offset))).abs() < 1e-12);
}

#[test]
fn non_finite_input_rejected_with_diagnostic() {
    let grid = Grid::line(8, 1.0).unwrap();
    let ops = SpectralOps::new(&grid);
    let mut f = ScalarField::constant(&grid, 1.0);
    f.data[5] = f64::NAN;
    let err = gradient(&ops, &f).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("non-finite") && msg.contains('5'), "{msg}");
}

#[test]
fn dealias_removes_top_third_modes() {
    let l = 2.0 * PI;
    let grid = Grid::line(32, l).unwrap();
    let ops = SpectralOps::new(&grid);
    // mode 12 > 32/3 -> removed; mode 3 kept
    let mut f = ScalarField::from_fn(&grid, |x| (3.0 * x[0]).cos() + (12.0 * x[0]).cos());
    ops.dealias(&mut f);
    let expected = ScalarField::from_fn(&grid, |x| (3.0 * x[0]).cos());
    for i in 0..grid.len() {
        assert!((f.data[i] - expected.data[i]).abs() < 1e-12);
    }
}
