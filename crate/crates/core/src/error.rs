use thiserror::Error;

use crate::energies::EnergyReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("field has {got} samples, grid expects {expected}")]
    SampleCount { expected: usize, got: usize },

    #[error("Dirichlet field has a nonzero boundary sample at index {index}")]
    BoundaryViolation { index: usize },

    #[error("multiplier `{0}` is not radial; only functions of |k| can act on a Dirichlet grid")]
    NonRadialMultiplier(String),

    #[error("singular multiplier `{0}`: symbol(0) is not finite")]
    SingularMultiplier(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported grid for this operation: {0}")]
    Unsupported(String),

    #[error("blow-up suspected at t = {time}: {reason}")]
    BlowUpSuspected {
        time: f64,
        reason: String,
        last_good: Option<Box<EnergyReport>>,
    },

    #[error("Petviashvili iteration did not converge after {iterations} iterations (residual {residual:e})")]
    Divergence {
        iterations: usize,
        residual: f64,
        residual_history: Vec<f64>,
    },

    #[error("iterate drifted off the real axis (imaginary part {imag:e} relative to max)")]
    NonRealDrift { imag: f64 },

    #[error("malformed field file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
