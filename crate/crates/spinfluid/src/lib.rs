//! Dual-solver library for a nonrelativistic spin-1/2 particle: the
//! two-component Pauli spinor picture and the equivalent fluid-with-spin
//! (Madelung) hydrodynamic picture on periodic grids, with numerical
//! verification of the correspondence, the underlying Hamiltonian
//! structure, and the N-fluid (plasma) extension.

pub mod em;
pub mod error;
pub mod field;
pub mod grid;
pub mod hamiltonian;
pub mod hydro;
pub mod identities;
pub mod io;
pub mod madelung;
pub mod params;
pub mod pauli;
pub mod plasma;
pub mod rng;
pub mod scenarios;
pub mod spectral;

pub use em::{AMode, FieldConfig};
pub use error::{Error, Result};
pub use field::{ComplexField, ScalarField, SymTensorField, VectorField3};
pub use grid::Grid;
pub use madelung::{HydroState, SpinorField};
pub use params::{PhysParams, PressureLaw};
pub use spectral::SpectralOps;
