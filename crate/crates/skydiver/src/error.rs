use std::path::PathBuf;

/// Crate-wide error type. Variants map onto CLI exit codes: usage errors
/// are handled by the argument parser (2), file/format problems exit with 3,
/// model/shape problems with 4.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("numeric domain: {0}")]
    Numeric(String),

    #[error("format error in {path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("unsupported format version {found} in {path} (expected {expected})")]
    UnsupportedVersion {
        path: PathBuf,
        found: u8,
        expected: u8,
    },

    #[error("length mismatch in {path}: expected {expected} bytes, got {actual}")]
    LengthMismatch {
        path: PathBuf,
        expected: u64,
        actual: u64,
    },

    #[error("search budget exceeded: {0}")]
    Budget(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for this error (see CLI docs).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Shape(_) | Error::Config(_) | Error::Numeric(_) => 4,
            Error::Format { .. }
            | Error::UnsupportedVersion { .. }
            | Error::LengthMismatch { .. }
            | Error::Budget(_)
            | Error::Io(_)
            | Error::Json(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
