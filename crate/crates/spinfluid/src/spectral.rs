//! Pseudospectral differential operators on periodic grids.
//!
//! All derivatives are evaluated by FFT along each axis with the symmetric
//! wavenumber convention. The Nyquist mode is zeroed in odd derivatives so
//! that derivatives of real fields stay real; even derivatives (Laplacian)
//! keep it. Nonlinear right-hand sides can be de-aliased with the 2/3 rule.

use crate::error::{Error, Result};
use crate::field::{ComplexField, ScalarField, VectorField3};
use crate::grid::Grid;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// FFT plans and wavenumber tables for one grid.
///
/// All methods take `&self` and allocate their own scratch, so one
/// `SpectralOps` may be shared freely across threads.
pub struct SpectralOps {
    grid: Grid,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
    wavenumbers: Vec<Vec<f64>>,
    /// 2/3-rule keep masks per axis (true = keep).
    dealias_keep: Vec<Vec<bool>>,
}

impl SpectralOps {
    pub fn new(grid: &Grid) -> Self {
        let mut planner = FftPlanner::new();
        let mut forward = Vec::new();
        let mut inverse = Vec::new();
        let mut wavenumbers = Vec::new();
        let mut dealias_keep = Vec::new();
        for a in 0..grid.dim() {
            let n = grid.sizes()[a];
            forward.push(planner.plan_fft_forward(n));
            inverse.push(planner.plan_fft_inverse(n));
            wavenumbers.push(grid.wavenumbers(a));
            let keep_max = (n / 3) as i64;
            dealias_keep.push(
                (0..n)
                    .map(|j| grid.mode_index(a, j).abs() <= keep_max)
                    .collect(),
            );
        }
        SpectralOps {
            grid: grid.clone(),
            forward,
            inverse,
            wavenumbers,
            dealias_keep,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Apply the FFT along `axis` to every line of `data` in place.
    fn transform_axis(&self, data: &mut [Complex64], axis: usize, forward: bool) {
        let n = self.grid.sizes()[axis];
        let stride = self.grid.stride(axis);
        let total = data.len();
        let plan = if forward {
            &self.forward[axis]
        } else {
            &self.inverse[axis]
        };
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        let norm = 1.0 / n as f64;
        // lines along `axis`: outer blocks of size n*stride, inner offset < stride
        let block = n * stride;
        let mut base = 0;
        while base < total {
            for off in 0..stride {
                let start = base + off;
                for j in 0..n {
                    line[j] = data[start + j * stride];
                }
                plan.process_with_scratch(&mut line, &mut scratch);
                if forward {
                    for j in 0..n {
                        data[start + j * stride] = line[j];
                    }
                } else {
                    for j in 0..n {
                        data[start + j * stride] = line[j] * norm;
                    }
                }
            }
            base += block;
        }
    }

    /// Full forward transform (all axes). Inverse is normalized.
    pub fn fft(&self, data: &mut [Complex64]) {
        for a in 0..self.grid.dim() {
            self.transform_axis(data, a, true);
        }
    }

    pub fn ifft(&self, data: &mut [Complex64]) {
        for a in 0..self.grid.dim() {
            self.transform_axis(data, a, false);
        }
    }

    fn to_complex(&self, f: &[f64]) -> Vec<Complex64> {
        f.iter().map(|&v| Complex64::new(v, 0.0)).collect()
    }

    /// Multiply the spectrum by `i*k_axis`, zeroing the Nyquist mode.
    fn apply_ik(&self, spec: &mut [Complex64], axis: usize) {
        let n = self.grid.sizes()[axis];
        let stride = self.grid.stride(axis);
        let ks = &self.wavenumbers[axis];
        let block = n * stride;
        let total = spec.len();
        let mut base = 0;
        while base < total {
            for j in 0..n {
                let factor = if self.grid.is_nyquist(axis, j) {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, ks[j])
                };
                let row = base + j * stride;
                for off in 0..stride {
                    spec[row + off] *= factor;
                }
            }
            base += block;
        }
    }

    /// Multiply the spectrum by `-|k|^2` (all axes; Nyquist kept).
    fn apply_minus_k_sq(&self, spec: &mut [Complex64]) {
        let dim = self.grid.dim();
        let sizes = self.grid.sizes().to_vec();
        let mut ijk = vec![0usize; dim];
        for (i, z) in spec.iter_mut().enumerate() {
            let mut rem = i;
            for a in (0..dim).rev() {
                ijk[a] = rem % sizes[a];
                rem /= sizes[a];
            }
            let mut k2 = 0.0;
            for a in 0..dim {
                let k = self.wavenumbers[a][ijk[a]];
                k2 += k * k;
            }
            *z *= -k2;
        }
    }

    /// d/dx_axis of a real field (returns the real part).
    fn derivative_axis(&self, f: &[f64], axis: usize) -> Vec<f64> {
        let mut spec = self.to_complex(f);
        self.fft(&mut spec);
        self.apply_ik(&mut spec, axis);
        self.ifft(&mut spec);
        spec.iter().map(|z| z.re).collect()
    }

    /// Spectral gradient; components along absent axes are zero.
    pub fn grad(&self, f: &ScalarField) -> VectorField3 {
        debug_assert_eq!(f.grid, self.grid);
        let mut out = VectorField3::zeros(&self.grid);
        let mut spec = self.to_complex(&f.data);
        self.fft(&mut spec);
        for a in 0..self.grid.dim() {
            let mut d = spec.clone();
            self.apply_ik(&mut d, a);
            self.ifft(&mut d);
            for (o, z) in out.comps[a].iter_mut().zip(&d) {
                *o = z.re;
            }
        }
        out
    }

    /// Spectral divergence of the components the grid supports.
    pub fn div(&self, v: &VectorField3) -> ScalarField {
        debug_assert_eq!(v.grid, self.grid);
        let mut acc = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        for a in 0..self.grid.dim() {
            let mut spec = self.to_complex(&v.comps[a]);
            self.fft(&mut spec);
            self.apply_ik(&mut spec, a);
            for (s, z) in acc.iter_mut().zip(&spec) {
                *s += z;
            }
        }
        self.ifft(&mut acc);
        ScalarField {
            grid: self.grid.clone(),
            data: acc.iter().map(|z| z.re).collect(),
        }
    }

    /// Spectral Laplacian.
    pub fn lap(&self, f: &ScalarField) -> ScalarField {
        debug_assert_eq!(f.grid, self.grid);
        let mut spec = self.to_complex(&f.data);
        self.fft(&mut spec);
        self.apply_minus_k_sq(&mut spec);
        self.ifft(&mut spec);
        ScalarField {
            grid: self.grid.clone(),
            data: spec.iter().map(|z| z.re).collect(),
        }
    }

    /// Spectral Laplacian of each component of a vector field.
    pub fn vector_lap(&self, v: &VectorField3) -> VectorField3 {
        let mut out = VectorField3::zeros(&self.grid);
        for c in 0..3 {
            let f = ScalarField {
                grid: self.grid.clone(),
                data: v.comps[c].clone(),
            };
            out.comps[c] = self.lap(&f).data;
        }
        out
    }

    /// Spectral curl. Derivatives along absent axes are zero.
    pub fn curl(&self, v: &VectorField3) -> VectorField3 {
        debug_assert_eq!(v.grid, self.grid);
        let dim = self.grid.dim();
        // d[c][a] = d v_c / d x_a for a < dim
        let mut d = vec![[None, None, None]; 3];
        for c in 0..3 {
            for (a, slot) in d[c].iter_mut().enumerate().take(dim) {
                *slot = Some(self.derivative_axis(&v.comps[c], a));
            }
        }
        let get = |c: usize, a: usize, i: usize| -> f64 {
            match &d[c][a] {
                Some(vals) => vals[i],
                None => 0.0,
            }
        };
        let n = self.grid.len();
        let mut out = VectorField3::zeros(&self.grid);
        for i in 0..n {
            out.comps[0][i] = get(2, 1, i) - get(1, 2, i);
            out.comps[1][i] = get(0, 2, i) - get(2, 0, i);
            out.comps[2][i] = get(1, 0, i) - get(0, 1, i);
        }
        out
    }

    /// Gradient of every component of a vector field: `out[c]` is grad(v_c).
    pub fn jacobian(&self, v: &VectorField3) -> [VectorField3; 3] {
        std::array::from_fn(|c| {
            let f = ScalarField {
                grid: self.grid.clone(),
                data: v.comps[c].clone(),
            };
            self.grad(&f)
        })
    }

    /// Cell-volume-weighted sum; exact quadrature for band-limited fields.
    pub fn integrate(&self, f: &ScalarField) -> f64 {
        debug_assert_eq!(f.grid, self.grid);
        f.data.iter().sum::<f64>() * self.grid.cell_volume()
    }

    /// Spectral energy `sum_k |f_k|^2 * V` (Parseval partner of
    /// `integrate(f^2)`).
    pub fn spectral_energy(&self, f: &ScalarField) -> f64 {
        let mut spec = self.to_complex(&f.data);
        self.fft(&mut spec);
        let n = self.grid.len() as f64;
        let v = self.grid.volume();
        spec.iter().map(|z| z.norm_sqr()).sum::<f64>() / (n * n) * v
    }

    /// Spectral derivative of a complex field along `axis` (no Nyquist zeroing
    /// is needed for norms here, but we keep the same convention).
    pub fn grad_complex(&self, f: &ComplexField) -> [ComplexField; 3] {
        debug_assert_eq!(f.grid, self.grid);
        let mut spec = f.data.clone();
        self.fft(&mut spec);
        std::array::from_fn(|a| {
            if a < self.grid.dim() {
                let mut d = spec.clone();
                self.apply_ik(&mut d, a);
                self.ifft(&mut d);
                ComplexField {
                    grid: self.grid.clone(),
                    data: d,
                }
            } else {
                ComplexField::zeros(&self.grid)
            }
        })
    }

    pub fn lap_complex(&self, f: &ComplexField) -> ComplexField {
        debug_assert_eq!(f.grid, self.grid);
        let mut spec = f.data.clone();
        self.fft(&mut spec);
        self.apply_minus_k_sq(&mut spec);
        self.ifft(&mut spec);
        ComplexField {
            grid: self.grid.clone(),
            data: spec,
        }
    }

    /// Zero all modes outside the 2/3 band (in place, spectral space).
    fn dealias_spectrum(&self, spec: &mut [Complex64]) {
        let dim = self.grid.dim();
        let sizes = self.grid.sizes().to_vec();
        let mut ijk = vec![0usize; dim];
        for (i, z) in spec.iter_mut().enumerate() {
            let mut rem = i;
            for a in (0..dim).rev() {
                ijk[a] = rem % sizes[a];
                rem /= sizes[a];
            }
            if !(0..dim).all(|a| self.dealias_keep[a][ijk[a]]) {
                *z = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// 2/3-rule truncation of a real field.
    pub fn dealias(&self, f: &mut ScalarField) {
        let mut spec = self.to_complex(&f.data);
        self.fft(&mut spec);
        self.dealias_spectrum(&mut spec);
        self.ifft(&mut spec);
        for (o, z) in f.data.iter_mut().zip(&spec) {
            *o = z.re;
        }
    }

    pub fn dealias_vector(&self, v: &mut VectorField3) {
        for c in 0..3 {
            let mut f = ScalarField {
                grid: self.grid.clone(),
                data: std::mem::take(&mut v.comps[c]),
            };
            self.dealias(&mut f);
            v.comps[c] = f.data;
        }
    }

    /// Solve `grad(theta) = g` for a periodic potential plus a linear part.
    ///
    /// The mean of `g` along each axis must be (within `tol`, relatively) an
    /// integer multiple of `2*pi*hbar / L_a`; that integer is the winding
    /// number and the corresponding linear term is added explicitly.
    /// Returns `(theta, windings)` with `theta` fixed to zero at flat index
    /// `anchor`.
    pub fn integrate_gradient(
        &self,
        g: &VectorField3,
        hbar: f64,
        anchor: usize,
        tol: f64,
    ) -> Result<(ScalarField, Vec<i64>)> {
        let dim = self.grid.dim();
        let npts = self.grid.len() as f64;
        // per-axis means (zero modes)
        let mut means = vec![0.0; dim];
        for (a, mean) in means.iter_mut().enumerate() {
            *mean = g.comps[a].iter().sum::<f64>() / npts;
        }
        let mut windings = vec![0i64; dim];
        for a in 0..dim {
            let l = self.grid.lengths()[a];
            let circulation = means[a] * l;
            let quantum = 2.0 * std::f64::consts::PI * hbar;
            let w = (circulation / quantum).round();
            let nearest = w * quantum;
            let defect = (circulation - nearest).abs() / quantum;
            if defect > tol {
                return Err(Error::WindingObstruction {
                    axis: a,
                    circulation,
                    nearest,
                    defect,
                });
            }
            windings[a] = w as i64;
        }
        // least-squares spectral solve of grad(theta_p) = g - mean(g)
        let n = self.grid.len();
        let mut acc = vec![Complex64::new(0.0, 0.0); n];
        let mut specs: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
        for a in 0..dim {
            let mut s = self.to_complex(&g.comps[a]);
            self.fft(&mut s);
            specs.push(s);
        }
        let sizes = self.grid.sizes().to_vec();
        let mut ijk = vec![0usize; dim];
        for i in 0..n {
            let mut rem = i;
            for a in (0..dim).rev() {
                ijk[a] = rem % sizes[a];
                rem /= sizes[a];
            }
            let mut k2 = 0.0;
            let mut num = Complex64::new(0.0, 0.0);
            for a in 0..dim {
                let nyq = self.grid.is_nyquist(a, ijk[a]);
                let k = if nyq { 0.0 } else { self.wavenumbers[a][ijk[a]] };
                k2 += k * k;
                num += Complex64::new(0.0, -k) * specs[a][i];
            }
            acc[i] = if k2 > 0.0 {
                num / k2
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        self.ifft(&mut acc);
        let mut theta = ScalarField {
            grid: self.grid.clone(),
            data: acc.iter().map(|z| z.re).collect(),
        };
        // add the linear (winding) part
        let quantum = 2.0 * std::f64::consts::PI * hbar;
        for i in 0..self.grid.len() {
            let x = self.grid.coords(i);
            let mut lin = 0.0;
            for a in 0..dim {
                lin += windings[a] as f64 * quantum / self.grid.lengths()[a] * x[a];
            }
            theta.data[i] += lin;
        }
        let t0 = theta.data[anchor];
        for v in &mut theta.data {
            *v -= t0;
        }
        Ok((theta, windings))
    }
}

/// Spectral gradient with input validation (the public contract used by the
/// rest of the crate; solvers call the raw `SpectralOps` methods internally).
pub fn gradient(ops: &SpectralOps, f: &ScalarField) -> Result<VectorField3> {
    check_same_grid(ops, &f.grid)?;
    f.check_finite("gradient input")?;
    Ok(ops.grad(f))
}

pub fn divergence(ops: &SpectralOps, v: &VectorField3) -> Result<ScalarField> {
    check_same_grid(ops, &v.grid)?;
    v.check_finite("divergence input")?;
    Ok(ops.div(v))
}

pub fn laplacian(ops: &SpectralOps, f: &ScalarField) -> Result<ScalarField> {
    check_same_grid(ops, &f.grid)?;
    f.check_finite("laplacian input")?;
    Ok(ops.lap(f))
}

pub fn curl(ops: &SpectralOps, v: &VectorField3) -> Result<VectorField3> {
    check_same_grid(ops, &v.grid)?;
    v.check_finite("curl input")?;
    Ok(ops.curl(v))
}

pub fn integrate(ops: &SpectralOps, f: &ScalarField) -> Result<f64> {
    check_same_grid(ops, &f.grid)?;
    f.check_finite("integrate input")?;
    Ok(ops.integrate(f))
}

fn check_same_grid(ops: &SpectralOps, grid: &Grid) -> Result<()> {
    if ops.grid() != grid {
        return Err(Error::GridMismatch("operator grid", "field grid"));
    }
    Ok(())
}
