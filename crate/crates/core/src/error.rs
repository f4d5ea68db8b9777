use thiserror::Error;

/// Errors raised across the library. Each variant maps onto one of the
/// command-level exit codes used by the CLI.
#[derive(Debug, Error)]
pub enum DqfError {
    /// Caller supplied an invalid argument, index or configuration.
    #[error("usage error: {0}")]
    Usage(String),

    /// The data itself cannot be analysed (degenerate pairs, ragged input, ...).
    #[error("data error: {0}")]
    Data(String),

    /// A numeric procedure failed to produce a finite result.
    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl DqfError {
    pub fn usage(msg: impl Into<String>) -> Self {
        DqfError::Usage(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        DqfError::Data(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        DqfError::Numeric(msg.into())
    }

    /// Process exit code: 2 usage, 3 data (including unreadable input), 4 numeric.
    pub fn exit_code(&self) -> i32 {
        match self {
            DqfError::Usage(_) => 2,
            DqfError::Data(_) | DqfError::Io(_) => 3,
            DqfError::Numeric(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, DqfError>;
