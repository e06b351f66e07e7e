//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Operands live in incompatible ambient dimensions.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// A documented precondition of an operation was violated by the input.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// Bad textual input (element, subspace or tree format).
    #[error("parse error: {0}")]
    Parse(String),
    /// Input exceeds a hard enumeration cap.
    #[error("size cap exceeded: {0}")]
    CapExceeded(String),
    /// A sampler was asked to draw from an empty support.
    #[error("empty support: {0}")]
    EmptySupport(String),
    /// An internal invariant failed; indicates a bug, not a usage error.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
