use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid Fock dimension {0}: need at least 2 levels")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid cavity parameters: {0}")]
    InvalidParams(String),

    #[error("no steady state: gain rate kappa={kappa} is not below loss rate gamma'={gamma_prime}")]
    NoSteadyState { gamma_prime: f64, kappa: f64 },

    #[error("invalid density operator: {0}")]
    InvalidState(String),

    #[error("invalid integrator config: {0}")]
    InvalidConfig(String),

    #[error("integration diverged at t={time}: {reason}")]
    IntegrationDiverged { time: f64, reason: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("shift t={t} is not a multiple of the grid spacing dx={dx}")]
    GridAlignment { t: f64, dx: f64 },

    #[error("vectors live on different grids")]
    GridMismatch,

    #[error("empty ensemble")]
    EmptyEnsemble,
}

pub type Result<T> = std::result::Result<T, Error>;
