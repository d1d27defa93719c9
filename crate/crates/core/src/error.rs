use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("denominator divisible by {p}{}", degree.map(|d| format!(" at degree {d}")).unwrap_or_default())]
    DenominatorDivisibleByP { p: u64, degree: Option<usize> },
    #[error("{0} is not a prime at least 5")]
    NotPrime(u64),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("arity mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),
    #[error("series has a nonzero constant term")]
    NonzeroConstantTerm,
    #[error("series is not invertible")]
    NotInvertible,
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("element is not square ({0},{1})")]
    NotSquare(usize, usize),
    #[error("color {color} exceeds the bound {bound}")]
    ColorOutOfRange { color: usize, bound: usize },
    #[error("triple ({0},{1},{2}) is not admissible")]
    NotAdmissible(usize, usize, usize),
    #[error("triple ({0},{1},{2}) is not admissible modulo {3}")]
    NotPAdmissible(usize, usize, usize, u64),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("vertex {0} is not an internal vertex")]
    NotInternal(usize),
    #[error("an internal component has no leg on a circle")]
    DisconnectedFromCircle,
    #[error("interpolation residual is nonzero: {0}")]
    InterpolationInconsistent(String),
    #[error("component {component} carries {legs} legs, above the bound {bound}")]
    LegCountTooLarge { component: usize, legs: usize, bound: usize },
    #[error("framing must be nonzero")]
    ZeroFraming,
    #[error("negative power of hbar survives at degree {0}")]
    NegativeDegreeResidue(i64),
    #[error("payload stops at degree {have}, degree {need} is required")]
    DegreeShortfall { have: usize, need: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
