use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NonHermitian { deviation: f64 },
    #[error("eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPsd { eigenvalue: f64 },
    #[error("matrix is singular (smallest singular value {sigma_min:e})")]
    Singular { sigma_min: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operation not supported on {0}")]
    UnsupportedSpace(String),
    #[error("point {0} lies outside the admissible domain")]
    OutOfDomain(String),
    #[error("truncation {requested} is too small; need at least {required}")]
    TruncationTooSmall { requested: usize, required: usize },
    #[error("operands live on different spaces: {0} vs {1}")]
    SpaceMismatch(String, String),
    #[error("kernel series did not reach the tail tolerance within {cap} terms")]
    SeriesNotConverged { cap: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("operand signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("hypothesis cannot be checked: {0}")]
    HypothesisUncheckable(String),
    #[error("vector lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("operand file: {0}")]
    OperandFile(String),
}

impl Error {
    /// True for errors caused by malformed input rather than numerical failure.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::NonHermitian { .. }
                | Error::NoConvergence { .. }
                | Error::NotPsd { .. }
                | Error::Singular { .. }
                | Error::SeriesNotConverged { .. }
                | Error::HypothesisUncheckable(_)
        )
    }
}
