use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Core(#[from] drea_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("plan error: {0}")]
    Plan(String),

    #[error("statistics error: {0}")]
    Stats(String),
}

pub type Result<T> = std::result::Result<T, BenchError>;

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> BenchError {
    let path = path.into();
    move |source| BenchError::Io { path, source }
}

pub(crate) fn csv_err(path: impl Into<PathBuf>) -> impl FnOnce(csv::Error) -> BenchError {
    let path = path.into();
    move |source| BenchError::Csv { path, source }
}
