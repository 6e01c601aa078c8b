use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("search budget exceeded: {0}")]
    SearchBudget(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("bitstream truncated")]
    Truncated,
    #[error("bad magic bytes")]
    BadMagic,
    #[error("checksum mismatch")]
    ChecksumMismatch,
    #[error("integer overflow guard: {0}")]
    Overflow(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
