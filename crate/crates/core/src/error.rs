use thiserror::Error;

/// Errors raised by the numerical routines and the experiment runner.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("principal coefficient matrix is not symmetric: a[0][1]={0}, a[1][0]={1}")]
    NotSymmetric(f64, f64),
    #[error("operator is not elliptic: {0}")]
    NotElliptic(String),
    #[error("reduced zero-order constant {re}+{im}i is not real; only real kappa is supported")]
    UnsupportedKappa { re: f64, im: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("node count {0} must be even and at least 8")]
    BadNodeCount(usize),
    #[error("exponent {0} outside the admissible range")]
    BadExponent(f64),
    #[error("target point ({0}, {1}) lies on the boundary curve")]
    PointOnCurve(f64, f64),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("no transfer case applies: {0}")]
    OutOfRange(String),
    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
