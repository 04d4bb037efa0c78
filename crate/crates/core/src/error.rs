use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("modulus must be an odd positive integer, got {0}")]
    EvenOrNonPositiveModulus(i64),

    #[error("{a} has no inverse modulo {modulus}")]
    NotCoprime { a: i64, modulus: i64 },

    #[error("index {index} out of range for dimension {d}")]
    IndexOutOfRange { index: usize, d: usize },

    #[error("invalid dimension {0}")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid basis pair (k={k}, k'={k_prime}) in dimension {d}: {reason}")]
    InvalidBasisPair {
        k: usize,
        k_prime: usize,
        d: usize,
        reason: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate optical system: {0}")]
    DegenerateOptics(String),

    #[error("pixels {0} and {1} overlap")]
    OverlappingPixels(usize, usize),

    #[error("infeasible layout: {0}")]
    InfeasibleLayout(String),

    #[error("no convergence: {0}")]
    NotConverged(String),

    #[error("probabilities not normalized (sum = {0})")]
    Unnormalized(f64),

    #[error("negative probability {0}")]
    NegativeProbability(f64),

    #[error("count matrix is empty (all zeros)")]
    EmptyCounts,

    #[error("dimension {0} is not prime")]
    NotPrime(usize),

    #[error("incomplete basis set: {0}")]
    IncompleteBases(String),

    #[error("estimator failed on resample {index}: {message}")]
    Resample { index: usize, message: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
