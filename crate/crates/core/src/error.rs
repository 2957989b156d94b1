use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid frequency: {0}")]
    InvalidFrequency(String),
    #[error("rational frequency: {0}")]
    RationalFrequency(String),
    #[error("insufficient depth for requested precision: need error below 2^-{needed}, depth {depth} gives 2^-{achieved}")]
    InsufficientDepth { depth: usize, needed: u32, achieved: u32 },
    #[error("precision exhausted at index {index}: distance below 2^-{guard}")]
    PrecisionExhausted { index: u64, guard: u32 },
    #[error("divisor vanished at index {0}")]
    DivisorVanished(u64),
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("invalid generators: {0}")]
    InvalidGenerators(String),
    #[error("{0} is not a member of the semigroup")]
    NotMember(u64),
    #[error("constant term must vanish")]
    NonzeroConstantTerm,
    #[error("oracle size {0} exceeds the limit of {1}")]
    OracleTooLarge(usize, usize),
    #[error("too few nonzero coefficients in window: {found} < {needed}")]
    TooFewCoefficients { found: usize, needed: usize },
    #[error("coefficient arguments admit no phase theta with arg a_k = k theta + pi/2: fails at mode {0}")]
    HypothesisViolated(u32),
    #[error("index {0} out of range")]
    IndexOutOfRange(u64),
    #[error("empty subsequence")]
    EmptySubsequence,
    #[error("no qualifying n_0 within depth {0}")]
    NoQualifyingStart(usize),
    #[error("config error: {0}")]
    Config(String),
    #[error("cache version mismatch: found {found}, expected {expected}")]
    CacheVersion { found: u32, expected: u32 },
    #[error("corrupt cache file: {0}")]
    CacheCorrupt(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
