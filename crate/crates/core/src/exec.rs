//! Data-parallel execution with a sequential fallback.
//!
//! With the `parallel` feature (on by default) [`Executor::Parallel`] maps
//! over rayon's pool. Results are always returned in index order and every
//! work item draws from its own RNG sub-stream, so both executors produce
//! bit-identical output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Executor {
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}

impl Executor {
    /// Every executor compiled into this build.
    pub fn available() -> Vec<Executor> {
        vec![
            Executor::Sequential,
            #[cfg(feature = "parallel")]
            Executor::Parallel,
        ]
    }

    pub fn name(self) -> &'static str {
        match self {
            Executor::Sequential => "sequential",
            #[cfg(feature = "parallel")]
            Executor::Parallel => "parallel",
        }
    }

    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Executor::Sequential => (0..n).map(f).collect(),
            #[cfg(feature = "parallel")]
            Executor::Parallel => (0..n).into_par_iter().map(f).collect(),
        }
    }

    /// Whether `pred` holds for any index in `range`. The answer does not
    /// depend on the executor; only how many items get checked does.
    pub fn any<F>(self, range: std::ops::Range<usize>, pred: F) -> bool
    where
        F: Fn(usize) -> bool + Sync + Send,
    {
        match self {
            Executor::Sequential => range.into_iter().any(pred),
            #[cfg(feature = "parallel")]
            Executor::Parallel => range.into_par_iter().any(pred),
        }
    }
}
