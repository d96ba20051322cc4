use thiserror::Error;

/// Error type shared by every module of the crate.
#[derive(Debug, Error)]
pub enum MiError {
    /// An input violated a mathematical or physical precondition.
    #[error("domain error: {0}")]
    Domain(String),
    /// A numerical procedure failed (no bracket, overflow, ill-conditioning,
    /// quadrature non-convergence, ...).
    #[error("numerical error: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, MiError>;

impl MiError {
    pub fn domain(msg: impl Into<String>) -> Self {
        MiError::Domain(msg.into())
    }
    pub fn numeric(msg: impl Into<String>) -> Self {
        MiError::Numeric(msg.into())
    }
}
