//! Periodic rectangular sampling lattices with spectral wavenumbers.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// A periodic rectangular grid in 1, 2, or 3 spatial dimensions.
///
/// Axis `a` of the grid is identified with spatial direction `a`
/// (0 = x, 1 = y, 2 = z). Vector fields always carry three components;
/// derivatives along axes the grid does not have are identically zero.
///
/// Data on the grid is stored row-major: the last axis is contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dim: usize,
    sizes: Vec<usize>,
    lengths: Vec<f64>,
}

impl Grid {
    pub fn new(sizes: &[usize], lengths: &[f64]) -> Result<Self> {
        let dim = sizes.len();
        if dim == 0 || dim > 3 {
            return Err(Error::Grid(format!("dim must be 1, 2, or 3, got {dim}")));
        }
        if lengths.len() != dim {
            return Err(Error::Grid(format!(
                "sizes has {dim} axes but lengths has {}",
                lengths.len()
            )));
        }
        for (a, (&n, &l)) in sizes.iter().zip(lengths).enumerate() {
            if n < 4 {
                return Err(Error::Grid(format!("sizes[{a}] = {n} < 4")));
            }
            if !(l > 0.0) || !l.is_finite() {
                return Err(Error::Grid(format!("lengths[{a}] = {l} must be positive")));
            }
        }
        Ok(Grid {
            dim,
            sizes: sizes.to_vec(),
            lengths: lengths.to_vec(),
        })
    }

    /// Uniform 1D grid of `n` points on `[0, length)`.
    pub fn line(n: usize, length: f64) -> Result<Self> {
        Grid::new(&[n], &[length])
    }

    /// Uniform square 2D grid.
    pub fn square(n: usize, length: f64) -> Result<Self> {
        Grid::new(&[n, n], &[length, length])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    /// Total number of lattice points.
    pub fn len(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid spacing along axis `a`.
    pub fn spacing(&self, a: usize) -> f64 {
        self.lengths[a] / self.sizes[a] as f64
    }

    /// Volume of one cell, `prod_a lengths[a]/sizes[a]`.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim).map(|a| self.spacing(a)).product()
    }

    /// Volume of the whole box.
    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }

    /// Signed integer mode index along axis `a` for storage index `j`,
    /// in standard FFT order: `0, 1, .., n/2, -(n/2-1), .., -1`.
    pub fn mode_index(&self, a: usize, j: usize) -> i64 {
        let n = self.sizes[a];
        if j <= n / 2 {
            j as i64
        } else {
            j as i64 - n as i64
        }
    }

    /// Whether storage index `j` along axis `a` is the Nyquist mode.
    pub fn is_nyquist(&self, a: usize, j: usize) -> bool {
        let n = self.sizes[a];
        n % 2 == 0 && j == n / 2
    }

    /// Discrete wavenumbers along axis `a` in FFT storage order,
    /// `k_j = 2*pi*m_j / L_a` with the symmetric convention.
    pub fn wavenumbers(&self, a: usize) -> Vec<f64> {
        let n = self.sizes[a];
        let dk = 2.0 * PI / self.lengths[a];
        (0..n).map(|j| dk * self.mode_index(a, j) as f64).collect()
    }

    /// Largest resolved wavenumber magnitude over all axes.
    pub fn k_max(&self) -> f64 {
        (0..self.dim)
            .map(|a| PI * self.sizes[a] as f64 / self.lengths[a])
            .fold(0.0, f64::max)
    }

    /// Physical coordinates of the lattice point with flat index `idx`.
    /// Coordinates of missing axes are zero.
    pub fn coords(&self, idx: usize) -> [f64; 3] {
        let mut out = [0.0; 3];
        let mut rem = idx;
        for a in (0..self.dim).rev() {
            let n = self.sizes[a];
            out[a] = (rem % n) as f64 * self.spacing(a);
            rem /= n;
        }
        out
    }

    /// Flat index from per-axis indices (length `dim`).
    pub fn flat_index(&self, ijk: &[usize]) -> usize {
        let mut idx = 0;
        for a in 0..self.dim {
            idx = idx * self.sizes[a] + ijk[a] % self.sizes[a];
        }
        idx
    }

    /// Stride (in elements) between consecutive points along axis `a`.
    pub fn stride(&self, a: usize) -> usize {
        self.sizes[a + 1..].iter().product()
    }
}
