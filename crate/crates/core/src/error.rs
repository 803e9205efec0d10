use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = NaveError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum NaveError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("evaluation failure: {0}")]
    EvaluationFailure(String),
    #[error("argument outside kernel domain: {0}")]
    DomainError(String),
    #[error("degenerate derivative: {0}")]
    DegenerateDerivative(String),
    #[error("matrix of order {dim} exceeds the exact-enumeration limit {limit}")]
    SizeLimit { dim: usize, limit: usize },
    #[error("degenerate probe: {0}")]
    ProbeDegenerate(String),
    #[error("AVE to LCP conversion impossible: both A+I and A-I are singular")]
    ConversionImpossible,
    #[error("invalid problem spec: {0}")]
    InvalidSpec(String),
    #[error("singular matrix (pivot {pivot:e} at column {column})")]
    SingularMatrix { column: usize, pivot: f64 },
    #[error("configuration error: {0}")]
    ConfigError(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl NaveError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        NaveError::Io {
            path: path.into(),
            source,
        }
    }
}
