//! Application-level error type and the process exit-code mapping.

use std::path::PathBuf;

use condout_core::Error as CoreError;
use thiserror::Error;

pub type AppResult<T> = Result<T, AppError>;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("data error in {path}: {message}")]
    Data { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl AppError {
    pub fn config(msg: impl Into<String>) -> AppError {
        AppError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> AppError {
        AppError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code category: 2 usage or configuration, 3 data or parse,
    /// 4 numeric, 5 io, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) => 2,
            AppError::Parse { .. } | AppError::Data { .. } => 3,
            AppError::Core(e) => match e {
                CoreError::Argument(_) | CoreError::Dimension { .. } => 2,
                CoreError::Parse { .. } | CoreError::Validation(_) => 3,
                CoreError::Numeric(_)
                | CoreError::Convergence { .. }
                | CoreError::UndefinedMetric(_) => 4,
            },
            AppError::Io { .. } => 5,
        }
    }
}
