use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("training diverged at epoch {epoch}")]
    Diverged { epoch: usize },

    #[error("complex SVD did not converge after {sweeps} sweeps (residual {residual:.3e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("bad magic, expected {expected:?}")]
    BadMagic { expected: &'static str },

    #[error("unsupported format version {found} (reader supports {supported})")]
    UnsupportedVersion { found: u16, supported: u16 },

    #[error("checksum mismatch or truncated data")]
    Checksum,

    #[error("wrong model: container was encoded with model {expected:08x}, got {found:08x}")]
    WrongModel { expected: u32, found: u32 },

    #[error("full-quaternion mode requires a model")]
    MissingModel,

    #[error("corrupt container: {0}")]
    Corrupt(String),

    #[error("unsupported image: {0}")]
    UnsupportedImage(String),

    #[error("malformed image header: {0}")]
    MalformedHeader(String),

    #[error("truncated image data")]
    TruncatedImage,

    #[error("png: {0}")]
    Png(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// Process exit status for the command-line front end:
    /// 1 usage, 2 data error, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParam(_) => 1,
            Error::Diverged { .. } | Error::NoConvergence { .. } | Error::NonFinite(_) => 3,
            _ => 2,
        }
    }
}

impl From<png::DecodingError> for Error {
    fn from(e: png::DecodingError) -> Self {
        match e {
            png::DecodingError::IoError(io) if io.kind() == io::ErrorKind::UnexpectedEof => {
                Error::TruncatedImage
            }
            other => Error::Png(other.to_string()),
        }
    }
}

impl From<png::EncodingError> for Error {
    fn from(e: png::EncodingError) -> Self {
        Error::Png(e.to_string())
    }
}
