use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("kernel invariant violated: {0}")]
    Invariant(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("rational fit failed: {0}")]
    FitFailure(String),

    #[error("pole/residue conversion failed: {0}")]
    ConversionFailure(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("quadratic form (Dv, v) = {value:e} is negative; operator is not positive definite")]
    NegativeQuadraticForm { value: f64 },

    #[error("conjugate gradients did not converge in {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("energy estimate violated at level {level}: E = {energy:e} > R = {bound:e}")]
    StabilityViolation {
        level: usize,
        energy: f64,
        bound: f64,
    },

    #[error("block mass matrix is numerically singular")]
    SingularMass,

    #[error("problem too large for dense reference: {size} > {limit}")]
    TooLarge { size: usize, limit: usize },

    #[error("quadrature failed on [{a:e}, {b:e}]: estimated error {err:e}")]
    Quadrature { a: f64, b: f64, err: f64 },

    #[error("checkpoint t = {t} is not on the time grid with step {tau}")]
    CheckpointMismatch { t: f64, tau: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerics, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::FitFailure(_)
                | Error::ConversionFailure(_)
                | Error::NoConvergence { .. }
                | Error::StabilityViolation { .. }
                | Error::SingularMass
                | Error::Quadrature { .. }
                | Error::NegativeQuadraticForm { .. }
        )
    }
}
