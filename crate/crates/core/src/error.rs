use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which part of a DREA run an error came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    PeakDetectionSearch,
    ArchiveTrim,
    PeakDetection,
    RobustSearch,
    Reporting,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::PeakDetectionSearch => "stage 1 (archive search)",
            Stage::ArchiveTrim => "stage 1 (archive trim)",
            Stage::PeakDetection => "stage 1 (peak detection)",
            Stage::RobustSearch => "stage 2 (robust search)",
            Stage::Reporting => "reporting",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("non-finite value at coordinate {index}")]
    NonFinite { index: usize },

    #[error("invalid bounds at coordinate {index}: lower {lower} must be below upper {upper}")]
    InvalidBounds { index: usize, lower: f64, upper: f64 },

    #[error("{counter} budget exhausted (cap {cap})")]
    BudgetExhausted { counter: &'static str, cap: u64 },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("no registered optimum for {problem} at {dim}-D")]
    UnknownOptimum { problem: String, dim: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn is_budget_exhausted(&self) -> bool {
        match self {
            Error::BudgetExhausted { .. } => true,
            Error::Stage { source, .. } => source.is_budget_exhausted(),
            _ => false,
        }
    }
}

pub(crate) trait StageContext<T> {
    fn in_stage(self, stage: Stage) -> Result<T>;
}

impl<T> StageContext<T> for Result<T> {
    fn in_stage(self, stage: Stage) -> Result<T> {
        self.map_err(|e| Error::Stage { stage, source: Box::new(e) })
    }
}
