use thiserror::Error;

/// Errors raised by the library. Absence of a decomposition or a failing
/// condition is reported as a value, never as an error.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("the zero polynomial has no sign")]
    ZeroPolynomial,

    #[error("quotient is not a polynomial: {0}")]
    NonPolynomialQuotient(String),

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("exponent data is not pure: q = {q}, r = {r}")]
    Purity { q: usize, r: usize },

    #[error("product of b-exponents {numerator} is not divisible by product of a-exponents {denominator}")]
    NonIntegerChi {
        numerator: String,
        denominator: String,
    },

    #[error("the Poincaré polynomial is not exactly known for this input (q > r without a model expression)")]
    NoExactHomology,

    #[error("requested formal dimension {requested} exceeds the census cap {cap}")]
    CapExceeded { requested: u32, cap: u32 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("unsupported leaf {0}: only complex projective spaces carry a mixed Hodge model")]
    UnsupportedLeaf(String),

    #[error("box certification inconclusive for n = {n} at depth {depth}")]
    Unknown { n: u32, depth: u32 },

    #[error("invalid number: {0:?}")]
    InvalidNumber(String),

    #[error("value does not fit in 64 bits: {0}")]
    Overflow(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
