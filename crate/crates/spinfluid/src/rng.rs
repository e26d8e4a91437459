//! Counter-based pseudo-random numbers and band-limited random fields.
//!
//! Oracle tests need random fields that are reproducible bit-for-bit across
//! runs and reconstructible in other languages, so instead of a stateful
//! generator we use a stateless 64-bit counter mix (splitmix64): value `i`
//! of stream `seed` is `mix(seed + i * GOLDEN)`.

use crate::field::{ScalarField, VectorField3};
use crate::grid::Grid;
use std::f64::consts::PI;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Stateless counter-based random stream.
#[derive(Debug, Clone, Copy)]
pub struct CounterRng {
    seed: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        CounterRng { seed }
    }

    /// Derive an independent stream (for sub-tasks of one seeded scenario).
    pub fn stream(&self, label: u64) -> CounterRng {
        CounterRng {
            seed: splitmix64(self.seed ^ label.wrapping_mul(GOLDEN)),
        }
    }

    pub fn u64_at(&self, counter: u64) -> u64 {
        splitmix64(self.seed.wrapping_add(counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform in [0, 1).
    pub fn uniform_at(&self, counter: u64) -> f64 {
        (self.u64_at(counter) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn range_at(&self, counter: u64, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform_at(counter)
    }
}

/// Analytic description of a band-limited random field: a sum of cosines
/// over integer mode vectors, evaluable at arbitrary points (so independent
/// oracles can differentiate it at their own step size).
#[derive(Debug, Clone)]
pub struct BandLimitedSpec {
    lengths: Vec<f64>,
    terms: Vec<([i64; 3], f64, f64)>,
    scale: f64,
}

impl BandLimitedSpec {
    pub fn eval(&self, x: [f64; 3]) -> f64 {
        let mut v = 0.0;
        for (m, a, phase) in &self.terms {
            let mut arg = *phase;
            for (axis, &l) in self.lengths.iter().enumerate() {
                arg += 2.0 * PI * m[axis] as f64 * x[axis] / l;
            }
            v += a * arg.cos();
        }
        v * self.scale
    }

    pub fn sample(&self, grid: &Grid) -> ScalarField {
        ScalarField::from_fn(grid, |x| self.eval(x))
    }
}

/// Random band-limited spec on the box of `grid`: all integer mode vectors
/// with components in `[-band, band]` (one representative per +/- pair),
/// amplitudes in [-1, 1], scaled by `amplitude / sqrt(n_terms)`, zero mean.
pub fn band_limited_spec(grid: &Grid, rng: &CounterRng, band: i64, amplitude: f64) -> BandLimitedSpec {
    let modes = mode_list(grid, band);
    let mut counter = 0u64;
    let mut terms = Vec::with_capacity(modes.len());
    for m in &modes {
        let a = rng.range_at(counter, -1.0, 1.0);
        let phase = rng.range_at(counter + 1, 0.0, 2.0 * PI);
        counter += 2;
        terms.push((*m, a, phase));
    }
    let scale = amplitude / (terms.len() as f64).sqrt().max(1.0);
    BandLimitedSpec {
        lengths: grid.lengths().to_vec(),
        terms,
        scale,
    }
}

/// Band-limited random scalar field sampled on the grid.
pub fn band_limited_scalar(grid: &Grid, rng: &CounterRng, band: i64, amplitude: f64) -> ScalarField {
    band_limited_spec(grid, rng, band, amplitude).sample(grid)
}

/// Three independent band-limited components.
pub fn band_limited_vector(
    grid: &Grid,
    rng: &CounterRng,
    band: i64,
    amplitude: f64,
) -> VectorField3 {
    VectorField3::from_components(
        band_limited_scalar(grid, &rng.stream(1), band, amplitude),
        band_limited_scalar(grid, &rng.stream(2), band, amplitude),
        band_limited_scalar(grid, &rng.stream(3), band, amplitude),
    )
}

fn mode_list(grid: &Grid, band: i64) -> Vec<[i64; 3]> {
    let dim = grid.dim();
    let mut out = Vec::new();
    let range = |_a: usize| -> Vec<i64> { (-band..=band).collect() };
    let mut push = |m: [i64; 3]| {
        if m.iter().any(|&v| v != 0) {
            // keep one representative of each +/- pair (cosine covers both)
            let first_nonzero = m.iter().find(|&&v| v != 0).copied().unwrap();
            if first_nonzero > 0 {
                out.push(m);
            }
        }
    };
    match dim {
        1 => {
            for i in range(0) {
                push([i, 0, 0]);
            }
        }
        2 => {
            for i in range(0) {
                for j in range(1) {
                    push([i, j, 0]);
                }
            }
        }
        _ => {
            for i in range(0) {
                for j in range(1) {
                    for k in range(2) {
                        push([i, j, k]);
                    }
                }
            }
        }
    }
    out
}
