//! Field containers: real scalar, 3-component real vector, complex scalar,
//! and symmetric 3x3 tensor fields on a [`Grid`].

use crate::error::{Error, Result};
use crate::grid::Grid;
use num_complex::Complex64;

/// Real scalar field sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: Grid,
    pub data: Vec<f64>,
}

/// Real 3-component vector field. Components are stored as three planar
/// scalar arrays; the field always has x, y, z components regardless of
/// the grid dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField3 {
    pub grid: Grid,
    pub comps: [Vec<f64>; 3],
}

/// Complex scalar field (one spinor component, for instance).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    pub grid: Grid,
    pub data: Vec<Complex64>,
}

/// Symmetric contravariant rank-2 tensor field; six independent components
/// stored in the order xx, yy, zz, xy, xz, yz.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensorField {
    pub grid: Grid,
    pub comps: [Vec<f64>; 6],
}

/// Component order used by [`SymTensorField`].
pub const SYM_PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];

impl ScalarField {
    pub fn zeros(grid: &Grid) -> Self {
        ScalarField {
            grid: grid.clone(),
            data: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: &Grid, value: f64) -> Self {
        ScalarField {
            grid: grid.clone(),
            data: vec![value; grid.len()],
        }
    }

    /// Sample `f(x, y, z)` at every lattice point.
    pub fn from_fn(grid: &Grid, mut f: impl FnMut([f64; 3]) -> f64) -> Self {
        let data = (0..grid.len()).map(|i| f(grid.coords(i))).collect();
        ScalarField {
            grid: grid.clone(),
            data,
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        ScalarField {
            grid: self.grid.clone(),
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        ScalarField {
            grid: self.grid.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn scale(&mut self, c: f64) {
        for v in &mut self.data {
            *v *= c;
        }
    }

    pub fn add_assign(&mut self, other: &ScalarField) {
        debug_assert_eq!(self.grid, other.grid);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    /// a += c * b
    pub fn axpy(&mut self, c: f64, b: &ScalarField) {
        debug_assert_eq!(self.grid, b.grid);
        for (a, b) in self.data.iter_mut().zip(&b.data) {
            *a += c * b;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, &v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.data.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    /// Plain (unweighted) discrete L2 norm, `sqrt(sum v^2 * dV)`.
    pub fn l2_norm(&self) -> f64 {
        let dv = self.grid.cell_volume();
        (self.data.iter().map(|&v| v * v).sum::<f64>() * dv).sqrt()
    }

    pub fn check_finite(&self, name: &'static str) -> Result<()> {
        for (i, &v) in self.data.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    field: name,
                    index: i,
                });
            }
        }
        Ok(())
    }

    /// Circular shift by integer lattice offsets (one per grid axis).
    pub fn shifted(&self, offset: &[i64]) -> Self {
        ScalarField {
            grid: self.grid.clone(),
            data: shift_data(&self.grid, &self.data, offset),
        }
    }
}

impl VectorField3 {
    pub fn zeros(grid: &Grid) -> Self {
        let n = grid.len();
        VectorField3 {
            grid: grid.clone(),
            comps: [vec![0.0; n], vec![0.0; n], vec![0.0; n]],
        }
    }

    pub fn constant(grid: &Grid, v: [f64; 3]) -> Self {
        let n = grid.len();
        VectorField3 {
            grid: grid.clone(),
            comps: [vec![v[0]; n], vec![v[1]; n], vec![v[2]; n]],
        }
    }

    pub fn from_fn(grid: &Grid, mut f: impl FnMut([f64; 3]) -> [f64; 3]) -> Self {
        let mut out = VectorField3::zeros(grid);
        for i in 0..grid.len() {
            let v = f(grid.coords(i));
            for c in 0..3 {
                out.comps[c][i] = v[c];
            }
        }
        out
    }

    pub fn from_components(x: ScalarField, y: ScalarField, z: ScalarField) -> Self {
        debug_assert_eq!(x.grid, y.grid);
        debug_assert_eq!(x.grid, z.grid);
        VectorField3 {
            grid: x.grid.clone(),
            comps: [x.data, y.data, z.data],
        }
    }

    pub fn len(&self) -> usize {
        self.comps[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps[0].is_empty()
    }

    pub fn at(&self, i: usize) -> [f64; 3] {
        [self.comps[0][i], self.comps[1][i], self.comps[2][i]]
    }

    pub fn set(&mut self, i: usize, v: [f64; 3]) {
        for c in 0..3 {
            self.comps[c][i] = v[c];
        }
    }

    pub fn scale(&mut self, c: f64) {
        for comp in &mut self.comps {
            for v in comp.iter_mut() {
                *v *= c;
            }
        }
    }

    pub fn axpy(&mut self, c: f64, b: &VectorField3) {
        debug_assert_eq!(self.grid, b.grid);
        for k in 0..3 {
            for (a, b) in self.comps[k].iter_mut().zip(&b.comps[k]) {
                *a += c * b;
            }
        }
    }

    /// Pointwise dot product with another vector field.
    pub fn dot(&self, other: &VectorField3) -> ScalarField {
        debug_assert_eq!(self.grid, other.grid);
        let mut out = ScalarField::zeros(&self.grid);
        for i in 0..self.len() {
            out.data[i] = self.comps[0][i] * other.comps[0][i]
                + self.comps[1][i] * other.comps[1][i]
                + self.comps[2][i] * other.comps[2][i];
        }
        out
    }

    /// Pointwise cross product `self x other`.
    pub fn cross(&self, other: &VectorField3) -> VectorField3 {
        debug_assert_eq!(self.grid, other.grid);
        let mut out = VectorField3::zeros(&self.grid);
        for i in 0..self.len() {
            let a = self.at(i);
            let b = other.at(i);
            out.set(i, cross3(a, b));
        }
        out
    }

    /// Pointwise squared magnitude.
    pub fn norm_sq(&self) -> ScalarField {
        self.dot(self)
    }

    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0, |m, &v| m.max(v.abs()))
    }

    pub fn l2_norm(&self) -> f64 {
        let dv = self.grid.cell_volume();
        let s: f64 = self
            .comps
            .iter()
            .flat_map(|c| c.iter())
            .map(|&v| v * v)
            .sum();
        (s * dv).sqrt()
    }

    pub fn check_finite(&self, name: &'static str) -> Result<()> {
        for comp in &self.comps {
            for (i, &v) in comp.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        field: name,
                        index: i,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn shifted(&self, offset: &[i64]) -> Self {
        VectorField3 {
            grid: self.grid.clone(),
            comps: [
                shift_data(&self.grid, &self.comps[0], offset),
                shift_data(&self.grid, &self.comps[1], offset),
                shift_data(&self.grid, &self.comps[2], offset),
            ],
        }
    }
}

impl ComplexField {
    pub fn zeros(grid: &Grid) -> Self {
        ComplexField {
            grid: grid.clone(),
            data: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_fn(grid: &Grid, mut f: impl FnMut([f64; 3]) -> Complex64) -> Self {
        let data = (0..grid.len()).map(|i| f(grid.coords(i))).collect();
        ComplexField {
            grid: grid.clone(),
            data,
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Pointwise |psi|^2.
    pub fn abs_sq(&self) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            data: self.data.iter().map(|z| z.norm_sqr()).collect(),
        }
    }

    pub fn scale(&mut self, c: Complex64) {
        for z in &mut self.data {
            *z *= c;
        }
    }

    pub fn check_finite(&self, name: &'static str) -> Result<()> {
        for (i, z) in self.data.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite {
                    field: name,
                    index: i,
                });
            }
        }
        Ok(())
    }
}

impl SymTensorField {
    pub fn zeros(grid: &Grid) -> Self {
        let n = grid.len();
        SymTensorField {
            grid: grid.clone(),
            comps: std::array::from_fn(|_| vec![0.0; n]),
        }
    }

    /// Component (i, j) by symmetry, as a borrowed slice.
    pub fn comp(&self, i: usize, j: usize) -> &[f64] {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let idx = SYM_PAIRS.iter().position(|&p| p == (i, j)).unwrap();
        &self.comps[idx]
    }

    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0, |m, &v| m.max(v.abs()))
    }
}

pub fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn shift_data(grid: &Grid, data: &[f64], offset: &[i64]) -> Vec<f64> {
    assert_eq!(offset.len(), grid.dim());
    let mut out = vec![0.0; data.len()];
    let dim = grid.dim();
    let sizes = grid.sizes();
    let mut ijk = vec![0usize; dim];
    for (i, v) in data.iter().enumerate() {
        // destination index: point i moves to i + offset (periodically)
        let mut rem = i;
        for a in (0..dim).rev() {
            ijk[a] = rem % sizes[a];
            rem /= sizes[a];
        }
        let mut dst = 0usize;
        for a in 0..dim {
            let n = sizes[a] as i64;
            let j = (ijk[a] as i64 + offset[a]).rem_euclid(n) as usize;
            dst = dst * sizes[a] + j;
        }
        out[dst] = *v;
    }
    out
}

/// Relative L2 difference `||a - b|| / ||b||` of two scalar fields.
pub fn rel_l2_scalar(a: &ScalarField, b: &ScalarField) -> f64 {
    debug_assert_eq!(a.grid, b.grid);
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in a.data.iter().zip(&b.data) {
        num += (x - y) * (x - y);
        den += y * y;
    }
    (num / den.max(f64::MIN_POSITIVE)).sqrt()
}

/// Relative L2 difference of two vector fields.
pub fn rel_l2_vector(a: &VectorField3, b: &VectorField3) -> f64 {
    debug_assert_eq!(a.grid, b.grid);
    let mut num = 0.0;
    let mut den = 0.0;
    for c in 0..3 {
        for (x, y) in a.comps[c].iter().zip(&b.comps[c]) {
            num += (x - y) * (x - y);
            den += y * y;
        }
    }
    (num / den.max(f64::MIN_POSITIVE)).sqrt()
}

/// Density-weighted relative L2 difference,
/// `sqrt(int rho |a-b|^2 / int rho |b|^2)`. The natural metric for
/// conditional fields like velocity and spin that are only defined where
/// there is fluid.
pub fn rel_l2_vector_weighted(a: &VectorField3, b: &VectorField3, rho: &ScalarField) -> f64 {
    debug_assert_eq!(a.grid, b.grid);
    debug_assert_eq!(a.grid, rho.grid);
    let mut num = 0.0;
    let mut den = 0.0;
    for c in 0..3 {
        for i in 0..rho.data.len() {
            let w = rho.data[i];
            let d = a.comps[c][i] - b.comps[c][i];
            num += w * d * d;
            den += w * b.comps[c][i] * b.comps[c][i];
        }
    }
    (num / den.max(f64::MIN_POSITIVE)).sqrt()
}
