use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("mismatched primes: {left} vs {right}")]
    MismatchedPrime { left: u64, right: u64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non p-power denominator: {value} is not in Z[1/{p}]")]
    NotPPowerDenominator { p: u64, value: String },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("cyclotomic level {level} too large for p = {p}")]
    LevelOverflow { p: u64, level: u32 },
    #[error("invalid scalar: {0}")]
    InvalidScalar(String),
    #[error("argument must be nonzero: {0}")]
    ZeroArgument(&'static str),
    #[error("cannot split a radius-{alpha} polydisc at radius {gamma}")]
    InvalidRadius { alpha: i64, gamma: i64 },
    #[error("refinement to {count_log} sub-balls is too large")]
    TooLarge { count_log: String },
    #[error("invalid split position {split} for dimension {dim}")]
    BadSplit { split: usize, dim: usize },
    #[error("radius {alpha} exceeds the depth limit {limit} of a custom pairing")]
    DepthExceeded { alpha: i64, limit: i64 },
    #[error("invalid Λ subgroup: {0}")]
    InvalidLambdaGroup(String),
    #[error("operation needs closed-form atoms, found a custom atom")]
    CustomAtomPresent,
    #[error("malformed query: {0}")]
    MalformedQuery(String),
    #[error("invalid custom table: {0}")]
    InvalidTable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
