//! Crate-wide error type.

use crate::recovery::RecoveryResult;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller violated an operation's precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A quantity became too ill-conditioned to use (e.g. a near-zero
    /// channel gain reached the equalizer).
    #[error("numerical conditioning: {0}")]
    Conditioning(String),

    /// An iterative solver ran out of iterations. The best iterate found
    /// so far is attached so callers can still use it as a diagnostic.
    #[error("solver did not converge: {reason}")]
    SolverStall {
        reason: String,
        best: Box<RecoveryResult>,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Config file could not be parsed.
    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
