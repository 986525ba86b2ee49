use thiserror::Error;

pub type Result<T> = std::result::Result<T, HarnessError>;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{0}")]
    Core(#[from] wigner_core::Error),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: u64, msg: String },
}
