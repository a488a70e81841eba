use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("matrix is not symmetric: entry ({row},{col}) is {a} but ({col},{row}) is {b}")]
    Asymmetric {
        row: usize,
        col: usize,
        a: i64,
        b: i64,
    },
    #[error("malformed matrix: {0}")]
    MalformedMatrix(String),
    #[error("no even unimodular form of rank {rank} and signature {sig}")]
    NoSuchForm { rank: u64, sig: i64 },
    #[error("form of rank {rank} and signature {sig} is definite; only indefinite forms are classified by rank and signature")]
    DefiniteForm { rank: u64, sig: i64 },
    #[error("invalid lens space parameters ({p}, {q}): {reason}")]
    InvalidLens { p: i64, q: i64, reason: &'static str },
    #[error("invalid Brieskorn triple ({p}, {q}, {r}): {reason}")]
    InvalidBrieskorn {
        p: i64,
        q: i64,
        r: i64,
        reason: &'static str,
    },
    #[error("invalid continued fraction: {0}")]
    InvalidContinuedFraction(String),
    #[error("vector is not a characteristic sublink of the linking matrix")]
    NotCharacteristic,
    #[error("cannot blow down index {index}: diagonal entry is {entry}, expected ±1")]
    NotBlowDownable { index: usize, entry: i64 },
    #[error("index {index} out of range for a form of rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("link vector has length {got}, expected {expected}")]
    LinkLength { got: usize, expected: usize },
    #[error("invalid spin filling (b2 = {b2}, sigma = {sigma}): {reason}")]
    InvalidFilling {
        b2: u64,
        sigma: i64,
        reason: &'static str,
    },
    #[error("closed spin 4-manifold must have signature divisible by 16, got {0}")]
    SignatureNotRokhlin(i64),
    #[error("inconsistent constraints: {0}")]
    InconsistentConstraints(String),
    #[error("no feasible splitting found for m <= {limit}")]
    SearchExhausted { limit: u64 },
    #[error("invalid surgery coefficient {p}/{q}: {reason}")]
    InvalidSurgery { p: i64, q: i64, reason: &'static str },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid fact registry: {0}")]
    InvalidRegistry(String),
    #[error("table cell n = {index} is not exact: [{lower}, {upper}]")]
    NotExact { index: u64, lower: u64, upper: String },
    #[error("{0}")]
    Contradiction(Box<crate::propagate::Contradiction>),
}

pub type Result<T> = std::result::Result<T, Error>;
