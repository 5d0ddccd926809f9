use thiserror::Error;

/// Errors produced by the library and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("index out of range: {0}")]
    IndexRange(String),

    /// A trajectory left the guarded region; the step index names the
    /// first offending update.
    #[error("solution diverged at step {step}: |value| = {value:.3e} exceeds {limit:.0e}")]
    Divergence { step: usize, value: f64, limit: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code convention: 2 for bad inputs, 3 for divergence,
    /// 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter(_) | Error::GridMismatch(_) | Error::IndexRange(_) => 2,
            Error::Divergence { .. } => 3,
            Error::Io(_) => 1,
        }
    }
}
