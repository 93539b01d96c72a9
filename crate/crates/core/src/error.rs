use thiserror::Error;

use crate::lp::LpError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("origin is not an interior point of the body")]
    OriginNotInterior,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("body has no vertex list and boundary sampling is disabled")]
    NotVertexEnumerable,
    #[error("linear map is singular or badly conditioned")]
    SingularMap,
    #[error("matrix is not an idempotent projection")]
    NotIdempotent,
    #[error("operation supports dimension at most {max}, got {dim}")]
    DimensionTooHigh { dim: usize, max: usize },
    #[error("invalid exponent p = {0}; need 1 <= p <= inf")]
    InvalidP(f64),
    #[error("cone is not full-dimensional")]
    DegenerateCone,
    #[error("double cone base is not 0-symmetric")]
    NotSymmetricBase,
    #[error("malformed specification: {0}")]
    MalformedSpec(String),
    #[error("unknown body name `{0}`")]
    UnknownName(String),
    #[error("generator capacity exceeded: requested {requested}, capacity {capacity}")]
    GeneratorCapacityExceeded { requested: usize, capacity: usize },
    #[error("symmetric search requested but a body is not 0-symmetric")]
    SymmetryFlagViolated,
    #[error("contact set is empty")]
    EmptyContactSet,
    #[error("position is not certified optimal (no contact-point decomposition)")]
    NotOptimalPosition,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("no condition of the triangle lemma holds (implementation failure)")]
    NoConditionHolds,
    #[error("postcondition failed: {0} (implementation failure)")]
    PostconditionFailed(String),
    #[error("unknown theorem suite `{0}`")]
    UnknownSuite(String),
    #[error("invalid body: {0}")]
    InvalidBody(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Lp(#[from] LpError),
}

impl Error {
    /// Errors caused by user input or violated hypotheses, as opposed to
    /// internal numerical failures.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Lp(_) | Error::NoConditionHolds | Error::PostconditionFailed(_))
    }
}
