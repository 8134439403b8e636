//! Experiment harness for `drea-core`: plans of seeded repetitions, a
//! resumable runner writing CSV files, and rank-sum summaries.

pub mod error;
pub mod plan;
pub mod runner;
pub mod stats;
pub mod summarize;

pub use error::{BenchError, Result};
pub use plan::{AlgoId, CaseSpec, DimBudget, ExperimentPlan, Profile, Variant};
pub use runner::{execute_run, load_all, load_group, run_experiment, ExperimentOutcome, RunReport};
pub use stats::{exact_test, mean, median, normal_test, sample_std, wilcoxon_rank_sum, RankSum, Verdict};
pub use summarize::{summarize, Cell, Mark, Summary};
