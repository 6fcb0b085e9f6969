use pform_core::CoreError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JetError {
    #[error("degree overflow: result has degree {degree} above the cap {cap}")]
    Overflow { degree: u32, cap: u32 },
    #[error("incompatible operands: {0}")]
    Incompatible(String),
    #[error("symmetry pattern violated: {0}")]
    Pattern(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

pub type Result<T> = std::result::Result<T, JetError>;
