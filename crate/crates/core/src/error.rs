use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("alphabet size must be at least 2, got {0}")]
    InvalidAlphabet(usize),
    #[error("symbol {symbol} is outside the alphabet of size {q}")]
    InvalidSymbol { symbol: u8, q: u8 },
    #[error("invalid probability distribution: {0}")]
    InvalidPmf(String),
    #[error("alphabet mismatch: expected q = {expected}, found q = {found}")]
    AlphabetMismatch { expected: u8, found: u8 },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("invalid transition matrix: {0}")]
    InvalidTransition(String),
    #[error("Markov chain is not ergodic: {0}")]
    NotErgodic(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("message {message} out of range for {count} messages")]
    MessageOutOfRange { message: usize, count: usize },
    #[error("invalid code parameters: {0}")]
    InvalidCode(String),
    #[error("enumeration size {required} exceeds cap {cap}")]
    CapExceeded { required: u128, cap: u128 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
