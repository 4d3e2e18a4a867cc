//! Error type shared by all modules.

use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Structurally invalid input (wrong rank, mixed parity, non-dominant
    /// tuple, malformed half-integer string, …).
    #[error("malformed input: {0}")]
    Malformed(String),

    /// Input is well-formed but outside the domain of the operation
    /// (e.g. a non-unitarizable label passed to a branching rule).
    #[error("domain error: {0}")]
    Domain(String),

    /// Numerical validation failed beyond the configured tolerance.
    #[error("numerical check failed: {0}")]
    Numerical(String),
}

impl CoreError {
    pub fn malformed(msg: impl Into<String>) -> Self {
        CoreError::Malformed(msg.into())
    }
    pub fn domain(msg: impl Into<String>) -> Self {
        CoreError::Domain(msg.into())
    }
    pub fn numerical(msg: impl Into<String>) -> Self {
        CoreError::Numerical(msg.into())
    }
}
