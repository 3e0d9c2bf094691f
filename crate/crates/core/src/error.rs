use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("matrix is not symmetric (asymmetry {0:.3e})")]
    NotSymmetric(f64),
    #[error("matrix is not symplectic (residual {0:.3e})")]
    NotSymplectic(f64),
    #[error("singular matrix (|det| = {0:.3e})")]
    Singular(f64),
    #[error("outside the operation's domain: {0}")]
    Domain(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("unknown suite '{0}'")]
    UnknownSuite(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of a mathematical precondition (as opposed to bad input).
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::NotSymplectic(_) | Error::Singular(_) | Error::Domain(_) | Error::NotSymmetric(_)
        )
    }
}
