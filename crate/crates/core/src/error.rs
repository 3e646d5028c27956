use thiserror::Error;

/// Errors raised anywhere in the toolkit.
///
/// The variants map onto the command-line exit codes: usage problems are
/// reported by the CLI itself, everything else falls into validation (2) or
/// resource (3).
#[derive(Debug, Error)]
pub enum Error {
    #[error("structural error: {0}")]
    Structure(String),

    #[error("parse error at line {line}: {message} (token `{token}`)")]
    Parse {
        line: usize,
        token: String,
        message: String,
    },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("pass `{pass}` not applicable: {reason}")]
    PassRefused { pass: &'static str, reason: String },

    #[error("invalid parameter: {0}")]
    Invalid(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Resource(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
