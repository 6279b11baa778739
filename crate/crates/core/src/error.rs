use thiserror::Error;

/// Errors raised by the counting routines.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(u64),

    #[error("support {support:?} is not a strictly increasing list of primes")]
    InvalidSupport { support: Vec<u64> },

    #[error("{0} is not square-free")]
    NotSquareFree(u64),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("product of the support overflows 64 bits")]
    ModulusOverflow,

    #[error("operands live in Z/{left}Z and Z/{right}Z")]
    ContextMismatch { left: u64, right: u64 },

    #[error("{value} is not a canonical residue modulo {modulus}")]
    NotCanonical { value: u64, modulus: u64 },

    #[error("residue {value} is not a member of the set")]
    NotAMember { value: u64 },

    #[error("the set is empty")]
    EmptySet,

    #[error("configuration is empty; the operation needs 0 in the configuration")]
    EmptyConfiguration,

    #[error("configuration does not contain 0")]
    MissingZero,

    #[error("subset explosion: complement has {size} elements, limit is {limit}")]
    SubsetExplosion { size: usize, limit: usize },

    #[error("prime {q} does not divide the modulus")]
    NotADivisor { q: u64 },

    #[error("gap length {0} is odd; only even gaps occur")]
    OddGap(u64),

    #[error("gap length must be at least 2, got {0}")]
    GapTooSmall(u64),

    #[error("enumeration budget exceeded: D = {gap} needs 2^{required_bits} subsets, budget is 2^{budget_bits}")]
    EnumerationBudget {
        gap: u64,
        required_bits: u32,
        budget_bits: u32,
    },

    #[error("coefficient listing for D = {gap} is only valid for p >= {p_star}, got p = {p}; use the exact path or the sieve oracle")]
    BelowThreshold { gap: u64, p: u64, p_star: u64 },

    #[error("segment size {size} is below p = {p}")]
    SegmentTooSmall { size: usize, p: u64 },

    #[error("census for p = {0} is incomplete")]
    IncompleteCensus(u64),

    #[error("gap counts for p = {p} cover {covered}, more than p#")]
    CensusOvershoot { p: u64, covered: String },

    #[error("listing for D = {gap} evaluates to {value} at p = {p}")]
    NegativeCount { gap: u64, p: u64, value: String },

    #[error("malformed listing line: {0}")]
    MalformedListing(String),

    #[error("cache I/O error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
