use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeckeError {
    /// Bad input: unknown curve, illegal label, unsupported parameters.
    #[error("configuration error: {0}")]
    Config(String),
    /// A computation would exceed an enumeration guard.
    #[error("guard exceeded: {0}")]
    Guard(String),
    /// Parameters outside the range where the closed formulas are known.
    #[error("domain error: {0}")]
    Domain(String),
    /// An internal consistency check failed.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, HeckeError>;
