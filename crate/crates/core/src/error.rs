use thiserror::Error;

/// Every failure the library reports. Variants carry enough context to name
/// the offending input or the violated hypothesis.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("prime {p} needs a ramified extension, which is not supported")]
    RamifiedUnsupported { p: String },
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("size limit exceeded: {count} > {limit}")]
    SizeLimit { count: u128, limit: u128 },
    #[error("coordinate does not generate the field")]
    NotGenerating,
    #[error("zero binary form")]
    ZeroForm,
    #[error("zero section")]
    ZeroSection,
    #[error("two points share the projection on factor {factor}")]
    ProjectionClash { factor: usize },
    #[error("zero subspace")]
    ZeroSubspace,
    #[error("internal mismatch: {0}")]
    InternalMismatch(String),
    #[error("subspaces intersect trivially")]
    DegenerateIntersection,
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("coincident points at the chosen place")]
    CoincidentPoints,
    #[error("distance is zero, proximity is infinite")]
    DistanceZero,
    #[error("points are equal")]
    EqualPoints,
    #[error("semi-stability condition violated: {0}")]
    SSViolated(String),
    #[error("polynomial does not define a real quadratic irrationality")]
    NotRealQuadratic,
    #[error("polynomial is reducible over Q: {0}")]
    Reducible(String),
    #[error("{0} is not prime")]
    NotPrime(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
