//! The two-stage pipeline: archive search, trim, peak detection, guided
//! robust search, high-fidelity report.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::archive::Archive;
use crate::budget::Budget;
use crate::error::{Error, Result, Stage, StageContext};
use crate::exec::Executor;
use crate::objective::Objective;
use crate::optimizers::{stage1_ncde_run, stage2_guided_de_run, DEParams, TracePoint};
use crate::peaks::{detect_peak_sets, PeakDetectionConfig};
use crate::problems::{ProblemConfig, ProblemSpec};
use crate::rng::{purpose, RngStream};
use crate::robustness::{report_effective_fitness, EffEstimatorConfig};
use crate::types::{DecisionVector, Fitness};

/// Default archive capacity.
pub const DEFAULT_ARCHIVE_CAP: usize = 10_000;

/// Stage caps `(stage-1 raw evaluations, stage-2 effective evaluations)` for
/// a dimension: 1e4 / 3e5 at 10-D, growing linearly by 2e3 / 6e4 per extra
/// dimension (so 2e4 / 6e5 at 15-D and 3e4 / 9e5 at 20-D).
pub fn stage_caps(dim: usize) -> Result<(u64, u64)> {
    if dim <= 5 {
        return Err(Error::config(format!("no standard stage budget for {dim}-D")));
    }
    let k = (dim - 5) as u64;
    Ok((2_000 * k, 60_000 * k))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DreaConfig {
    pub problem: ProblemSpec,
    pub de: DEParams,
    pub peaks_cfg: PeakDetectionConfig,
    pub est: EffEstimatorConfig,
    pub n_a: usize,
    pub stage1_raw_cap: u64,
    pub stage2_eff_cap: u64,
    pub seed: u64,
}

impl DreaConfig {
    /// Default parameters with the standard caps for the problem's dimension.
    pub fn standard(problem: ProblemSpec, seed: u64) -> Result<Self> {
        let (s1, s2) = stage_caps(problem.dim())?;
        Ok(DreaConfig {
            problem,
            de: DEParams::default(),
            peaks_cfg: PeakDetectionConfig::default(),
            est: EffEstimatorConfig::default(),
            n_a: DEFAULT_ARCHIVE_CAP,
            stage1_raw_cap: s1,
            stage2_eff_cap: s2,
            seed,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.de.validate()?;
        self.peaks_cfg.validate()?;
        self.est.validate()?;
        let n = self.de.pop_size as u64;
        if self.stage1_raw_cap < n {
            return Err(Error::config(format!("stage-1 cap {} is below the population size {n}", self.stage1_raw_cap)));
        }
        if self.stage2_eff_cap < n {
            return Err(Error::config(format!("stage-2 cap {} is below the population size {n}", self.stage2_eff_cap)));
        }
        if self.n_a < self.peaks_cfg.n_p {
            return Err(Error::config("archive cap must be at least the number of peaks"));
        }
        Ok(())
    }

    pub fn from_file_config(f: &DreaConfigFile) -> Result<Self> {
        let problem = ProblemSpec::from_config(&f.problem)?;
        let (s1, s2) = match (f.stage1_raw_cap, f.stage2_eff_cap) {
            (Some(a), Some(b)) => (a, b),
            _ => stage_caps(problem.dim())?,
        };
        let mut cfg = DreaConfig {
            problem,
            de: DEParams::default(),
            peaks_cfg: PeakDetectionConfig::default(),
            est: EffEstimatorConfig::default(),
            n_a: DEFAULT_ARCHIVE_CAP,
            stage1_raw_cap: s1,
            stage2_eff_cap: s2,
            seed: f.seed,
        };
        if let Some(de) = f.de {
            cfg.de = de;
        }
        if let Some(p) = f.peaks {
            cfg.peaks_cfg = p;
        }
        if let Some(e) = f.estimator {
            cfg.est = e;
        }
        if let Some(n) = f.n_a {
            cfg.n_a = n;
        }
        if let Some(c) = f.stage1_raw_cap {
            cfg.stage1_raw_cap = c;
        }
        if let Some(c) = f.stage2_eff_cap {
            cfg.stage2_eff_cap = c;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let f: DreaConfigFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        DreaConfig::from_file_config(&f)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        DreaConfig::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_file_config(&self) -> DreaConfigFile {
        DreaConfigFile {
            seed: self.seed,
            problem: self.problem.to_config(),
            de: Some(self.de),
            peaks: Some(self.peaks_cfg),
            estimator: Some(self.est),
            n_a: Some(self.n_a),
            stage1_raw_cap: Some(self.stage1_raw_cap),
            stage2_eff_cap: Some(self.stage2_eff_cap),
        }
    }
}

/// On-disk run configuration. Anything omitted takes the default.
///
/// ```toml
/// seed = 7
/// [problem]
/// problem = "f2"
/// dim = 10
/// [peaks]
/// theta = 0.2617993877991494
/// n_p = 3
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DreaConfigFile {
    pub seed: u64,
    pub problem: ProblemConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub de: Option<DEParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peaks: Option<PeakDetectionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimator: Option<EffEstimatorConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_a: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage1_raw_cap: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage2_eff_cap: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustResult {
    pub best_x: DecisionVector,
    /// The selection-time estimate (`samples_per_eval` samples) of `best_x`.
    pub search_eff: Fitness,
    /// The `report_samples` estimate of `best_x`.
    pub reported_eff: Fitness,
    /// Peak of each detected set, best first, with its raw fitness.
    pub peaks_found: Vec<(DecisionVector, Fitness)>,
    /// Stage-2 convergence, one point per generation; evaluation counts are
    /// stage-2 effective evaluations.
    pub convergence: Vec<TracePoint>,
    /// Stage-1 and stage-2 budgets combined, plus the reporting samples.
    pub budget_final: Budget,
    pub archive_len: usize,
}

pub fn run_drea(cfg: &DreaConfig) -> Result<RobustResult> {
    run_drea_with(cfg, Executor::default())
}

pub fn run_drea_with(cfg: &DreaConfig, exec: Executor) -> Result<RobustResult> {
    cfg.validate()?;
    let root = RngStream::new(cfg.seed, 0);
    let problem = &cfg.problem;

    let mut stage1 = Budget::raw_only(cfg.stage1_raw_cap);
    let archive: Archive = stage1_ncde_run(problem, &cfg.de, &mut stage1, &root.child(purpose::STAGE1_SEARCH))
        .in_stage(Stage::PeakDetectionSearch)?;
    let archive_len = archive.len();
    let trimmed = archive.trim(cfg.n_a, &mut root.child(purpose::ARCHIVE_TRIM)).in_stage(Stage::ArchiveTrim)?;
    drop(archive);
    let sets = detect_peak_sets(&trimmed, &cfg.peaks_cfg, exec).in_stage(Stage::PeakDetection)?;
    let peaks_found: Vec<(DecisionVector, Fitness)> = sets.iter().map(|s| (s.peak().x.clone(), s.peak().f)).collect();
    let peaks: Vec<DecisionVector> = peaks_found.iter().map(|(x, _)| x.clone()).collect();

    let mut stage2 = Budget::eff_only(cfg.stage2_eff_cap);
    let out = stage2_guided_de_run(problem, &peaks, &cfg.de, &cfg.est, &mut stage2, &root.child(purpose::STAGE2_SEARCH), exec)
        .in_stage(Stage::RobustSearch)?;

    let best_x = out.best.x;
    let search_eff = out.best.eff_fitness.expect("stage 2 evaluates every member");
    let reported_eff =
        report_effective_fitness(problem, &best_x, cfg.est.report_samples, cfg.est.boundary, &root.child(purpose::REPORT), exec)
            .in_stage(Stage::Reporting)?;

    let mut budget_final = stage1;
    budget_final.absorb(&stage2);
    budget_final.record_samples(cfg.est.report_samples as u64);

    Ok(RobustResult { best_x, search_eff, reported_eff, peaks_found, convergence: out.trace, budget_final, archive_len })
}
