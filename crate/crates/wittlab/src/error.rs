use thiserror::Error;

/// Domain errors raised by the library.
///
/// Every variant carries a stable machine-readable code (see [`Error::code`])
/// used by the CLI's structured JSON error output.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("element is not divisible: {0}")]
    NotDivisible(String),
    #[error("division result is not unique (ring has torsion): {0}")]
    NotUnique(String),
    #[error("no Frobenius lift declared for this ring at p = {0}")]
    NoLiftDeclared(u64),
    #[error("{0} is not a member of the truncation set")]
    NotAMember(u64),
    #[error("not a sublattice: {0}")]
    NotASublattice(String),
    #[error("mismatched shapes: {0}")]
    MismatchedShape(String),
    #[error("ghost vector is not in the image of the ghost map: {0}")]
    NotInGhostImage(String),
    #[error("integrality violation while solving ghost equations: {0}")]
    IntegralityViolation(String),
    #[error("prime {0} is not invertible in the coefficient ring")]
    PrimeNotInvertible(u64),
    #[error("invalid truncation pair: {0}")]
    BadTruncationPair(String),
    #[error("truncation set is not an initial segment {{1..m}}")]
    NotInitialSegment,
    #[error("Frobenius is not bijective on this ring")]
    NotPerfect,
    #[error("Frobenius is not injective on this ring")]
    FrobeniusNotInjective,
    #[error("precision exhausted during exact division: {0}")]
    PrecisionExhausted(String),
    #[error("input too large for exhaustive enumeration: {0}")]
    TooLarge(String),
    #[error("construction failed within the search budget: {0}")]
    ConstructionFailed(String),
    #[error("set is not divisor-closed: missing divisor {0}")]
    NotDivisorClosed(u64),
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("type error: {0}")]
    Type(String),
    #[error("serialization error: {0}")]
    Serde(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("{0}")]
    Verification(String),
}

impl Error {
    /// Stable error code for structured output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotDivisible(_) => "NotDivisible",
            Error::NotUnique(_) => "NotUnique",
            Error::NoLiftDeclared(_) => "NoLiftDeclared",
            Error::NotAMember(_) => "NotAMember",
            Error::NotASublattice(_) => "NotASublattice",
            Error::MismatchedShape(_) => "MismatchedShape",
            Error::NotInGhostImage(_) => "NotInGhostImage",
            Error::IntegralityViolation(_) => "IntegralityViolation",
            Error::PrimeNotInvertible(_) => "PrimeNotInvertible",
            Error::BadTruncationPair(_) => "BadTruncationPair",
            Error::NotInitialSegment => "NotInitialSegment",
            Error::NotPerfect => "NotPerfect",
            Error::FrobeniusNotInjective => "FrobeniusNotInjective",
            Error::PrecisionExhausted(_) => "PrecisionExhausted",
            Error::TooLarge(_) => "TooLarge",
            Error::ConstructionFailed(_) => "ConstructionFailed",
            Error::NotDivisorClosed(_) => "NotDivisorClosed",
            Error::InvalidRing(_) => "InvalidRing",
            Error::Syntax { .. } => "SyntaxError",
            Error::Type(_) => "TypeError",
            Error::Serde(_) => "SerdeError",
            Error::Io(_) => "IoError",
            Error::Verification(_) => "VerificationFailed",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
