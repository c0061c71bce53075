use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A monomial with nonzero power of `k` survived collection in a
    /// recursion whose result must be free of explicit powers of `k`.
    #[error("k-power cancellation failed in {context}: k^{exponent} keeps coefficient {residue}")]
    Cancellation {
        context: String,
        exponent: i64,
        residue: String,
    },

    #[error("{bits}-bit precision not reachable within {limit} Euler-Maclaurin terms")]
    PrecisionUnreachable { bits: usize, limit: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
