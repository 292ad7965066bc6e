use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{field} must be {requirement}")]
    InvalidParam {
        field: &'static str,
        requirement: &'static str,
    },

    #[error("unknown parameter key '{0}'")]
    UnknownKey(alloc::string::String),

    #[error("replica index {index} out of range 1..={replicas}")]
    ReplicaIndex { index: usize, replicas: usize },

    #[error("replica count must be at least {min}, got {got}")]
    ReplicaCount { min: usize, got: usize },

    #[error("refusing to build M = {replicas}: above the ceiling of {ceiling} replicas")]
    DimensionCeiling { replicas: usize, ceiling: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("dimension {0} is not a power of {1}")]
    NotPowerOf(usize, usize),

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("bose factor needs a finite x > 0, got {0}")]
    BoseDomain(f64),

    #[error("correlator needs N <= M, got N = {n}, M = {m}")]
    CorrelatorOrder { n: usize, m: usize },

    #[error("eigensolver failed on a {dim}x{dim} matrix")]
    Eigensolver { dim: usize },

    #[error("empty spectrum")]
    EmptySpectrum,

    #[error("steady state is not unique: kernel dimension {0}")]
    DegenerateSteadyState(usize),

    #[error("invalid qubit state: {0}")]
    InvalidState(&'static str),

    #[error("fit input: {0}")]
    FitInput(&'static str),

    #[error("pole guard violated: |1 + c| = {0}")]
    PoleGuard(f64),

    #[error("logarithm undefined for non-positive value {0}")]
    NonPositive(f64),
}
