use thiserror::Error;

/// Errors raised by the measure library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("alphabet mismatch: expected size {expected}, got {found}")]
    AlphabetMismatch { expected: usize, found: usize },

    #[error("symbol {symbol} is outside an alphabet of size {size}")]
    SymbolOutOfRange { symbol: usize, size: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("enumeration of {required} items exceeds the cap of {cap}; {hint}")]
    Resource {
        required: u128,
        cap: u128,
        hint: &'static str,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("witness failed: information gains {gain_a} and {gain_b} coincide; pick priors further apart")]
    WitnessFailed { gain_a: f64, gain_b: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
