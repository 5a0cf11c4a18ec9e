use thiserror::Error;

use crate::field::FieldError;

/// Errors reported by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("degree {deg} exceeds the bound {bound}")]
    BoundTooSmall { deg: usize, bound: usize },
    #[error("power series has a zero constant term")]
    NonUnitConstantTerm,
    #[error("product of length {0} exceeds the transform capacity")]
    DegreeOverflow(usize),
    #[error("polynomial {0} is not monic or is constant")]
    NotMonic(usize),
    #[error("polynomials {0} and {1} are not coprime")]
    NotCoprime(usize, usize),
    #[error("family does not match the requested flavor: {0}")]
    BadFlavor(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("evaluation points are not pairwise distinct")]
    DegeneratePoints,
    #[error("displacement operator is not invertible")]
    SingularOperator,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("matrix is singular")]
    Singular,
    #[error("linear system has no solution")]
    NoSolution,
    #[error("invalid degree profile: {0}")]
    BadDegreeProfile(String),
    #[error("instance exceeds the dense size limit ({0} unknowns)")]
    SizeLimit(usize),
}

impl From<FieldError> for Error {
    fn from(_: FieldError) -> Self {
        Error::ZeroInverse
    }
}

pub type Result<T> = std::result::Result<T, Error>;
