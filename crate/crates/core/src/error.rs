//! Crate-wide error type.
//!
//! Every failure carries enough context to be reported without a backtrace,
//! and maps onto one of three exit-code categories: configuration (2),
//! data (3), numeric (4).

use std::path::PathBuf;
use thiserror::Error;

/// Exit-code category for a failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Invalid configuration or parameters; exit code 2.
    Config,
    /// Unreadable, malformed, or unusable input data; exit code 3.
    Data,
    /// Numeric failure at runtime (non-finite values); exit code 4.
    Numeric,
}

impl ErrorCategory {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCategory::Config => 2,
            ErrorCategory::Data => 3,
            ErrorCategory::Numeric => 4,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("dimension {dim} exceeds the embedded direction-number table (max {max})")]
    UnsupportedDimension { dim: usize, max: usize },

    #[error("invalid bounds at dimension {index}: lb {lb} must be < ub {ub}")]
    InvalidBounds { index: usize, lb: f64, ub: f64 },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("{}: row {row}: {message}", path.display())]
    CsvFormat {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("{}: row {row}, column {col}: cannot parse {value:?} as a number", path.display())]
    Parse {
        path: PathBuf,
        row: usize,
        col: usize,
        value: String,
    },

    #[error("{}: row {row}, column {col}: missing value", path.display())]
    MissingValue {
        path: PathBuf,
        row: usize,
        col: usize,
    },

    #[error("{}: {message}", path.display())]
    InvalidDataset { path: PathBuf, message: String },

    #[error("stratification failed: {0}")]
    Stratification(String),

    #[error("label index {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::InvalidConfig(_)
            | Error::DimensionMismatch { .. }
            | Error::UnsupportedDimension { .. }
            | Error::InvalidBounds { .. } => ErrorCategory::Config,
            Error::EmptyInput(_)
            | Error::CsvFormat { .. }
            | Error::InvalidDataset { .. }
            | Error::Parse { .. }
            | Error::MissingValue { .. }
            | Error::Stratification(_)
            | Error::LabelOutOfRange { .. }
            | Error::Io { .. } => ErrorCategory::Data,
            Error::NumericFailure(_) => ErrorCategory::Numeric,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.category().exit_code()
    }
}

pub type Result<T> = std::result::Result<T, Error>;
