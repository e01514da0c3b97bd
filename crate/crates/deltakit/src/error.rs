//! Crate-wide error type.

/// Errors produced by measures, builders, and decoders.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A precondition on the input was violated (empty text, out-of-range
    /// position, malformed parameter, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A brute-force oracle was invoked on an input larger than its guard.
    #[error("oracle limit exceeded: {0}")]
    OracleLimitExceeded(String),

    /// All seeded attempts produced grammars over the size budget.
    #[error("size budget {budget} exceeded after {attempts} attempts")]
    BudgetExceeded { budget: u64, attempts: u32 },

    /// Malformed serialized data. `offset` is the byte position at which
    /// decoding failed.
    #[error("parse error at byte {offset}: {msg}")]
    Parse { offset: usize, msg: String },

    /// An internal invariant was violated; indicates a bug.
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn parse(offset: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            offset,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
