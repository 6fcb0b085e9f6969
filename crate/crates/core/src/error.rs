use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    #[error("unknown algebra {0:?}")]
    UnknownAlgebra(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("placement is not injective: {0:?}")]
    NonInjective(Vec<usize>),
    #[error("singular metric")]
    SingularMetric,
    #[error("singular point: spectral parameters coincide (u = v = {0})")]
    SingularPoint(f64),
    #[error("operator is not supported on the expected slots: expected {expected:?}, got {got:?}")]
    WrongSupport { expected: Vec<usize>, got: Vec<usize> },
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("path is not closed")]
    OpenPath,
    #[error("inconsistent orientation: {0}")]
    InconsistentOrientation(String),
    #[error("non-manifold gluing: {0}")]
    NonManifold(String),
    #[error("grid is not periodic: {0}")]
    NonPeriodicGrid(String),
    #[error("vanishing denominator in constant probe")]
    VanishingDenominator,
}

pub type Result<T> = std::result::Result<T, CoreError>;
