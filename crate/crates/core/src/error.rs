use crate::grid::SlabGrid;
use thiserror::Error;

/// Crate-wide error type. Numerical soft failures (Jacobian leaving its
/// window, loss of invertibility) are reported through step status values,
/// not through this enum; these are hard contract violations.
#[derive(Debug, Error)]
pub enum SolverError {
    #[error("grid too small: direction 3 needs at least {min} nodes, got {got}")]
    GridTooSmall { got: usize, min: usize },

    #[error("grid mismatch between operands: {0:?} vs {1:?}")]
    GridMismatch(SlabGrid, SlabGrid),

    #[error("adiabatic exponent gamma must lie strictly in (1, 3), got {0}")]
    GammaOutOfRange(f64),

    #[error("density must be positive in the interior: rho0 = {value:.6e} at node {node:?}")]
    InteriorVacuum { value: f64, node: (usize, usize, usize) },

    #[error("physical-vacuum slope violated on the {face} face: d(omega0)/dN = {slope:.6e} (need strictly negative)")]
    BoundarySlope { face: &'static str, slope: f64 },

    #[error("density does not vanish on the {face} face: |omega0| reaches {value:.6e}")]
    FaceDensity { face: &'static str, value: f64 },

    #[error("diffusion tensor loses coercivity: min sampled eigenvalue {min:.6e} < {bound:.6e}")]
    Coercivity { min: f64, bound: f64 },

    #[error("empty Galerkin basis (truncation produced no modes)")]
    EmptyBasis,

    #[error("snapshot format: {0}")]
    Snapshot(String),

    #[error("config: {0}")]
    Config(String),

    #[error("scenario requires {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SolverError>;
