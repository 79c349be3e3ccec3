use thiserror::Error;

/// Errors raised by the simulation core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("bath of {spins} spins is outside the supported range 1..={max}")]
    InvalidBathSize { spins: u32, max: u32 },

    #[error("total spin {twice_spin}/2 is not a sector of a {spins}-spin bath")]
    InvalidSector { spins: u32, twice_spin: u32 },

    #[error("bath sector weights sum to {sum}, expected 1")]
    UnnormalizedBath { sum: f64 },

    #[error("unphysical Bloch vector: norm {norm} exceeds 1")]
    UnphysicalState { norm: f64 },

    #[error("density matrix has trace {trace}, expected 1")]
    NonUnitTrace { trace: f64 },

    #[error("expected a {expected}x{expected} matrix, found {rows}x{cols}")]
    DimensionMismatch { expected: usize, rows: usize, cols: usize },

    #[error("measurement basis parameter r = {0} must be finite and non-negative")]
    InvalidBasisParameter(f64),

    #[error("inhomogeneity {0} must lie in [-1, 1]")]
    InvalidInhomogeneity(f64),

    #[error("measurement outcome has probability {probability}, too small to condition on")]
    ImpossibleOutcome { probability: f64 },

    #[error("channel is not of the isotropic (f, g) form: residual {residual}")]
    ModelMismatch { residual: f64 },

    #[error("quadratic fit needs at least {needed} points inside the horizon, found {found}")]
    InsufficientPoints { needed: usize, found: usize },

    #[error("full-space evolution is limited to {max} bath spins, requested {requested}")]
    SizeLimit { requested: u32, max: u32 },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
