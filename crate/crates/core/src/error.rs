use std::path::PathBuf;

use thiserror::Error;

use crate::time::YearMonth;

/// Errors produced while loading data, configuring or running an analysis.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: malformed CSV at row {row}: {message}")]
    Csv {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("{path}: column '{column}' not found in header")]
    MissingColumn { path: PathBuf, column: String },

    #[error("{path}: row {row}: column '{column}' is not a finite number: '{value}'")]
    NonNumeric {
        path: PathBuf,
        row: usize,
        column: String,
        value: String,
    },

    #[error("{path}: row {row}: invalid month '{value}' (expected YYYY-MM)")]
    BadTimestamp {
        path: PathBuf,
        row: usize,
        value: String,
    },

    #[error("{path}: row {row}: timestamps are not strictly increasing")]
    NonMonotone { path: PathBuf, row: usize },

    #[error("{path}: row {row}: gap in monthly data, missing {missing}")]
    Gap {
        path: PathBuf,
        row: usize,
        missing: YearMonth,
    },

    #[error("series '{name}': non-positive value {value} at index {index}")]
    NonPositive {
        name: String,
        index: usize,
        value: f64,
    },

    #[error("series '{name}': zero variance")]
    ZeroVariance { name: String },

    #[error("series '{name}': length {len} is below the minimum of {min}")]
    TooShort {
        name: String,
        len: usize,
        min: usize,
    },

    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("series '{a}' and '{b}' do not overlap")]
    NoOverlap { a: String, b: String },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("config error in {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    /// Process exit code for the command-line front end.
    ///
    /// 1 = configuration, 2 = data, 3 = numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::InvalidParams(_) => 1,
            Error::Io { .. }
            | Error::Csv { .. }
            | Error::MissingColumn { .. }
            | Error::NonNumeric { .. }
            | Error::BadTimestamp { .. }
            | Error::NonMonotone { .. }
            | Error::Gap { .. }
            | Error::NonPositive { .. }
            | Error::ZeroVariance { .. }
            | Error::TooShort { .. }
            | Error::InvalidSeries(_)
            | Error::NoOverlap { .. } => 2,
            Error::GridMismatch(_) | Error::Numeric(_) => 3,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
