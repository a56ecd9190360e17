use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite value at {0}")]
    NonFinite(String),
    #[error("too little data: {0}")]
    Empty(String),
    #[error("duplicate model id `{0}`")]
    DuplicateId(String),
    #[error("target is constant (SST = 0)")]
    ConstantTarget,
    #[error("VIF needs at least two columns, got {0}")]
    TooFewColumns(usize),
    #[error("no bundled Nemenyi constant for {methods} methods (supported: 2..=20)")]
    UnsupportedM { methods: usize },
    #[error("unsupported confidence level {0} (supported: 0.90, 0.95)")]
    UnsupportedConfidence(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("trial `{trial}` failed: {reason}")]
    TrialFailed { trial: String, reason: String },
    #[error("method `{method}` failed on `{dataset}`: {reason}")]
    MethodFailed {
        method: String,
        dataset: String,
        reason: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        match err.kind() {
            csv::ErrorKind::Io(e) => Error::Io(e.to_string()),
            _ => Error::Parse(err.to_string()),
        }
    }
}
