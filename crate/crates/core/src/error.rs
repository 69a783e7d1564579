use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("both points are unimodular and coincide; the Moebius distance is undefined")]
    DegenerateBoundaryPair,
    #[error("Blaschke reconstruction failed: {0}")]
    ReconstructionFailure(String),
    #[error("the zero tuple has no boundary scale")]
    NoBoundaryScale,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}

pub(crate) fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::PreconditionViolation(msg.into()))
}
