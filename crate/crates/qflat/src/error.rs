use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero is not a valid input for {0}")]
    ZeroInput(&'static str),
    #[error("operands live at different places")]
    PlaceMismatch,
    #[error("parity mismatch: L(1-{k}, chi) with chi(-1) = {chi_parity} vanishes identically")]
    ParityMismatch { k: usize, chi_parity: i8 },
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),
    #[error("form or space is not positive definite")]
    NotPositiveDefinite,
    #[error("basis does not span an integer-valued lattice")]
    NotIntegerValued,
    #[error("empty diagonal")]
    EmptyDiagonal,
    #[error("inconsistent GHY data: {0}")]
    InconsistentGhy(String),
    #[error("local data violates the global product formula")]
    ProductFormulaViolated,
    #[error("no rational space exists for this profile: {0}")]
    NoSuchSpace(String),
    #[error("assembly search exceeded the auxiliary prime ceiling {0}")]
    AssemblySearchExceeded(u64),
    #[error("character incoherent with profile: expected discriminant {expected}, got {got}")]
    IncoherentCharacter { expected: i64, got: i64 },
    #[error("accumulated genus mass {accumulated} exceeds target {target}")]
    MassOvershoot { accumulated: String, target: String },
    #[error("neighbor prime cap {0} exhausted before the genus mass was reached")]
    PrimeExhaustion(usize),
    #[error("cannot factor {0} with the configured trial bound")]
    Unfactorable(String),
    #[error("automorphism count exceeds u64")]
    AutOverflow,
    #[error("coefficient does not fit in i64")]
    CoefficientOverflow,
    #[error("degenerate lift for neighbor construction")]
    DegenerateLine,
    #[error("rank scan completeness could not be certified; pass an explicit rank-max")]
    CertificationFailure,
    #[error("invalid run configuration: {0}")]
    BadConfig(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
