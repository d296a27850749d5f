use thiserror::Error;

/// Failure modes shared by every module of the crate.
///
/// The variants map one-to-one onto the exit classes of the command-line
/// driver: `Usage` (2), `Config` (3) and `Integrity` (4). `Shape` and
/// `Unsupported` are programming errors surfaced as usage failures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("numerical integrity violated: {0}")]
    Integrity(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid usage: {0}")]
    Usage(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
