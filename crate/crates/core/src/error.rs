use thiserror::Error;

use crate::cxmat::MatError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported material pairing: {0}")]
    UnsupportedPairing(String),
    #[error("invalid stack: {0}")]
    InvalidStack(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("singular matrix at region {index}: {source}")]
    Singular { index: usize, source: MatError },
    #[error(transparent)]
    Matrix(#[from] MatError),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("not converged: {message}")]
    NonConvergence {
        message: String,
        partial: Box<crate::thermo::ObservableResult>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
