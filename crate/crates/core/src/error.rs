use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation (n < 3, negative
    /// weights in β mode, asymmetric matrix, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A brute-force oracle or size guard refused an oversized input.
    #[error("capacity exceeded: {what} is {got}, limit is {limit}")]
    Capacity {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    /// An internal invariant did not hold. Always a bug or malformed input
    /// handed to a pipeline stage.
    #[error("invariant violation: {0}")]
    Invariant(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    pub(crate) fn invariant(message: impl Into<String>) -> Self {
        Error::Invariant(message.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
