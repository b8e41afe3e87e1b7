use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("field mismatch: F_{left} vs F_{right}")]
    FieldMismatch { left: u32, right: u32 },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("boundary mismatch in {context}: {detail}")]
    BoundaryMismatch {
        context: &'static str,
        detail: String,
    },

    #[error("orthogonal complement is only defined for linear relations (relation has a nonzero shift)")]
    UnsupportedShift,

    #[error("{0} is not invertible mod {1}")]
    NotInvertible(u32, u32),

    #[error("subspace is not coisotropic (classified as {0})")]
    NotCoisotropic(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid diagram: {0}")]
    Diagram(String),

    #[error("invalid code: {0}")]
    Code(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
