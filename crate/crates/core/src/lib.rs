//! Dual-stage robust evolutionary optimization.
//!
//! Stage 1 searches the unperturbed objective with a niching DE and keeps
//! every visited point in an archive. Peaks of the landscape are read off
//! the archive, then stage 2 runs a peak-guided DE on a Monte-Carlo estimate
//! of the mean objective under input perturbation.
//!
//! ```no_run
//! use drea_core::{run_drea, DreaConfig, ProblemId, ProblemSpec};
//!
//! let problem = ProblemSpec::new(ProblemId::F2, 10)?;
//! let result = run_drea(&DreaConfig::standard(problem, 7)?)?;
//! println!("{:?} -> {}", result.best_x, result.reported_eff.value());
//! # Ok::<(), drea_core::Error>(())
//! ```

pub mod archive;
pub mod budget;
pub mod drea;
pub mod error;
pub mod exec;
pub mod objective;
pub mod optimizers;
pub mod peaks;
pub mod problems;
pub mod rng;
pub mod robustness;
pub mod types;

pub use archive::{Archive, ArchiveEntry};
pub use budget::Budget;
pub use drea::{run_drea, run_drea_with, stage_caps, DreaConfig, RobustResult};
pub use error::{Error, Result, Stage};
pub use exec::Executor;
pub use objective::{FnObjective, Objective};
pub use optimizers::{Algorithm, DEParams, JadeState, SearchOutcome};
pub use peaks::{detect_peak_sets, detect_peaks, PeakDetectionConfig, PeakSet};
pub use problems::{known_original_optima, known_robust_optimum, GaussianMixture, ProblemId, ProblemSpec};
pub use rng::RngStream;
pub use robustness::{effective_fitness, report_effective_fitness, EffEstimatorConfig, SampleBoundary};
pub use types::{clamp_reflect, BoundaryRepair, Bounds, DecisionVector, Fitness, Individual};
