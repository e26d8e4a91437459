//! Initial-condition constructors shared by the test suites and the CLI.

use crate::field::ComplexField;
use crate::madelung::SpinorField;
use crate::spectral::SpectralOps;
use num_complex::Complex64;
use std::f64::consts::PI;

pub use crate::pauli::gaussian_packet;

/// Normalized plane wave `e^{i k.x}` with spin direction `(eta, phi)`.
pub fn plane_wave(ops: &SpectralOps, k: [f64; 3], spin: [f64; 2]) -> SpinorField {
    let grid = ops.grid().clone();
    let v = grid.volume();
    let (half, phi0) = (0.5 * spin[0], spin[1]);
    let c1 = half.cos() / v.sqrt();
    let c2 = half.sin() / v.sqrt();
    SpinorField::new(
        ComplexField::from_fn(&grid, |x| {
            Complex64::from_polar(c1, k[0] * x[0] + k[1] * x[1] + k[2] * x[2])
        }),
        ComplexField::from_fn(&grid, |x| {
            Complex64::from_polar(c2, k[0] * x[0] + k[1] * x[1] + k[2] * x[2] + phi0)
        }),
    )
}

/// Uniform-density spinor whose spin winds `turns` times along `axis`
/// (a spin helix with pitch `L_axis / turns`).
pub fn helix_texture(ops: &SpectralOps, axis: usize, turns: i64, tilt: f64) -> SpinorField {
    let grid = ops.grid().clone();
    let v = grid.volume();
    let k = 2.0 * PI * turns as f64 / grid.lengths()[axis];
    let half = 0.5 * tilt;
    SpinorField::new(
        ComplexField::from_fn(&grid, |_| Complex64::new(half.cos() / v.sqrt(), 0.0)),
        ComplexField::from_fn(&grid, |x| {
            Complex64::from_polar(half.sin() / v.sqrt(), k * x[axis])
        }),
    )
}

/// Smooth 2D spin texture with `eta`, `phi` and the density varying on the
/// largest scales of the box and `sin(eta)` bounded below by about
/// `cos(amplitude)`. Exercises the spin-stress force and the full torque.
pub fn texture_2d(ops: &SpectralOps, amplitude: f64) -> SpinorField {
    let grid = ops.grid().clone();
    assert!(grid.dim() >= 2, "texture_2d needs at least a 2D grid");
    let kx = 2.0 * PI / grid.lengths()[0];
    let ky = 2.0 * PI / grid.lengths()[1];
    let eta = move |x: [f64; 3]| PI / 2.0 + amplitude * (kx * x[0]).sin() * (ky * x[1]).cos();
    let rho = move |x: [f64; 3]| 1.0 + 0.25 * (kx * x[0]).cos() * (ky * x[1]).sin();
    let theta1 = move |x: [f64; 3]| 0.4 * (ky * x[1]).sin();
    let phi = move |x: [f64; 3]| 0.7 * (kx * x[0]).cos() + 0.5 * (ky * x[1]).sin();
    let mut psi = SpinorField::new(
        ComplexField::from_fn(&grid, |x| {
            Complex64::from_polar(rho(x).sqrt() * (eta(x) / 2.0).cos(), theta1(x))
        }),
        ComplexField::from_fn(&grid, |x| {
            Complex64::from_polar(rho(x).sqrt() * (eta(x) / 2.0).sin(), theta1(x) + phi(x))
        }),
    );
    psi.normalize(ops);
    psi
}

/// Uniform spinor tilted by `eta0` from the z axis (Larmor scenarios).
pub fn uniform_tilted(ops: &SpectralOps, eta0: f64, phi0: f64) -> SpinorField {
    let grid = ops.grid().clone();
    let v = grid.volume();
    SpinorField::new(
        ComplexField::from_fn(&grid, |_| {
            Complex64::new((eta0 / 2.0).cos() / v.sqrt(), 0.0)
        }),
        ComplexField::from_fn(&grid, |_| {
            Complex64::from_polar((eta0 / 2.0).sin() / v.sqrt(), phi0)
        }),
    )
}
