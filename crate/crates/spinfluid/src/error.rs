use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("grid mismatch between {0} and {1}")]
    GridMismatch(&'static str, &'static str),

    #[error("non-finite value in `{field}` at flat index {index}")]
    NonFinite { field: &'static str, index: usize },

    #[error(
        "vacuum: {count} of {total} points below density floor {floor:.3e} \
         (min rho = {min_rho:.3e}, first offending flat index {first})"
    )]
    VacuumPoint {
        count: usize,
        total: usize,
        floor: f64,
        min_rho: f64,
        first: usize,
    },

    #[error("density must be strictly positive (min rho = {min_rho:.3e} at flat index {index})")]
    NonPositiveDensity { min_rho: f64, index: usize },

    #[error(
        "spin field violates |s| = 1: max deviation {max_dev:.3e} at flat index {index} \
         (tolerance {tol:.1e})"
    )]
    SpinNorm {
        max_dev: f64,
        index: usize,
        tol: f64,
    },

    #[error(
        "phase reconstruction obstructed on axis {axis}: circulation {circulation:.12e} \
         is not an integer multiple of 2*pi*hbar (nearest {nearest:.12e}, \
         relative defect {defect:.3e})"
    )]
    WindingObstruction {
        axis: usize,
        circulation: f64,
        nearest: f64,
        defect: f64,
    },

    #[error(
        "density breakdown at t = {time:.6e}: floor active on {active} of {total} points \
         ({percent:.3}% > 0.1%)"
    )]
    VacuumBreakdown {
        time: f64,
        active: usize,
        total: usize,
        percent: f64,
    },

    #[error("spin norm drifted by {drift:.3e} in one step at t = {time:.6e} (alarm at 1e-4)")]
    SpinDriftAlarm { drift: f64, time: f64 },

    #[error("invalid field configuration: {0}")]
    FieldConfig(String),

    #[error("invalid parameters: {0}")]
    Params(String),

    #[error("interaction kernel: {0}")]
    Kernel(String),

    #[error("product grid of {cells} cells exceeds the diagnostic budget of {budget} cells")]
    ProductBudget { cells: usize, budget: usize },

    #[error("snapshot format: {0}")]
    SnapshotFormat(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
