//! Seeded repetitions of a plan, written to a directory of CSV files.
//!
//! Layout under the output directory:
//!
//! * `runs/<case>__<algo>.csv`: `seed,reported_eff,eff_evals,raw_samples`
//! * `convergence/<case>__<algo>__seed<seed>.csv`: `eff_evals_used,best_eff`
//! * `timings/<case>__<algo>.csv`: `seed,wall_secs`
//! * `skipped.csv`: `case,reason`
//!
//! Everything except `timings/` is a pure function of the plan. A group whose
//! `runs/` file exists is loaded instead of rerun.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use drea_core::optimizers::{baseline_run, TracePoint};
use drea_core::rng::purpose;
use drea_core::{
    report_effective_fitness, run_drea_with, Budget, DEParams, DreaConfig, EffEstimatorConfig, Executor,
    PeakDetectionConfig, ProblemSpec, RngStream,
};

use crate::error::{csv_err, io_err, BenchError, Result};
use crate::plan::{AlgoId, CaseSpec, ExperimentPlan, Variant};

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub case: CaseSpec,
    /// Algorithm label, e.g. `drea`, `jade` or `drea-np2`.
    pub algo: String,
    pub seed: u64,
    pub reported_eff: f64,
    pub eff_evals: u64,
    /// Direct objective evaluations plus perturbed samples, reporting included.
    pub raw_samples: u64,
    pub wall_secs: f64,
    pub convergence: Vec<TracePoint>,
}

/// One full run of `variant` on `case` with the plan's budgets.
pub fn execute_run(plan: &ExperimentPlan, case: CaseSpec, variant: Variant, seed: u64, exec: Executor) -> Result<RunReport> {
    let problem = ProblemSpec::new(case.problem, case.dim)?;
    let (s1, s2) = plan.budget_for(case.dim)?;
    let de = DEParams::default();
    let est = EffEstimatorConfig::default();
    let start = Instant::now();

    let (reported_eff, budget, convergence) = match variant.algo {
        AlgoId::Drea => {
            let cfg = DreaConfig {
                problem,
                de,
                peaks_cfg: PeakDetectionConfig { n_p: variant.n_p.unwrap_or(PeakDetectionConfig::default().n_p), ..Default::default() },
                est,
                n_a: drea_core::drea::DEFAULT_ARCHIVE_CAP,
                stage1_raw_cap: s1,
                stage2_eff_cap: s2,
                seed,
            };
            let r = run_drea_with(&cfg, exec)?;
            (r.reported_eff.value(), r.budget_final, r.convergence)
        }
        AlgoId::Baseline(algo) => {
            let root = RngStream::new(seed, 0);
            let mut budget = Budget::eff_only(s1 + s2);
            let out = baseline_run(algo, &problem, &de, &est, &mut budget, &root.child(purpose::BASELINE), exec)?;
            let rep = report_effective_fitness(&problem, &out.best.x, est.report_samples, est.boundary, &root.child(purpose::REPORT), exec)?;
            budget.record_samples(est.report_samples as u64);
            (rep.value(), budget, out.trace)
        }
    };

    Ok(RunReport {
        case,
        algo: variant.label(),
        seed,
        reported_eff,
        eff_evals: budget.eff_evals_used(),
        raw_samples: budget.total_raw(),
        wall_secs: start.elapsed().as_secs_f64(),
        convergence,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    /// Grouped by (case, algorithm) in plan order, seeds ascending.
    pub reports: Vec<RunReport>,
    pub skipped: Vec<(CaseSpec, String)>,
    /// Groups loaded from disk rather than run.
    pub resumed: Vec<(CaseSpec, String)>,
}

fn runs_path(out: &Path, case: &CaseSpec, label: &str) -> PathBuf {
    out.join("runs").join(format!("{}__{label}.csv", case.id()))
}

fn convergence_path(out: &Path, case: &CaseSpec, label: &str, seed: u64) -> PathBuf {
    out.join("convergence").join(format!("{}__{label}__seed{seed}.csv", case.id()))
}

fn timings_path(out: &Path, case: &CaseSpec, label: &str) -> PathBuf {
    out.join("timings").join(format!("{}__{label}.csv", case.id()))
}

/// Runs every group of `plan` not already present under `out`.
///
/// `workers` bounds the thread pool (0 = one per core); it has no effect on
/// the written results.
pub fn run_experiment(plan: &ExperimentPlan, out: &Path, workers: usize) -> Result<ExperimentOutcome> {
    plan.validate()?;
    for sub in ["runs", "convergence", "timings"] {
        fs::create_dir_all(out.join(sub)).map_err(io_err(out.join(sub)))?;
    }
    let pool = Pool::new(workers)?;

    let mut outcome = ExperimentOutcome { reports: Vec::new(), skipped: Vec::new(), resumed: Vec::new() };
    for case in &plan.cases {
        if let Some(reason) = plan.unresolvable(case) {
            outcome.skipped.push((*case, reason));
            continue;
        }
        for variant in plan.variants() {
            let label = variant.label();
            let path = runs_path(out, case, &label);
            if path.exists() {
                outcome.reports.extend(load_group(out, *case, &label)?);
                outcome.resumed.push((*case, label));
                continue;
            }
            let seeds: Vec<u64> = (0..plan.repetitions).map(|i| plan.seed(i)).collect();
            let reports = pool.map(&seeds, |&seed| execute_run(plan, *case, variant, seed, Executor::default()))?;
            write_group(out, *case, &label, &reports)?;
            outcome.reports.extend(reports);
        }
    }
    write_skipped(out, &outcome.skipped)?;
    Ok(outcome)
}

struct Pool {
    #[cfg(feature = "parallel")]
    inner: rayon::ThreadPool,
}

impl Pool {
    fn new(workers: usize) -> Result<Self> {
        #[cfg(feature = "parallel")]
        {
            let inner = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| BenchError::Plan(format!("cannot start worker pool: {e}")))?;
            Ok(Pool { inner })
        }
        #[cfg(not(feature = "parallel"))]
        {
            let _ = workers;
            Ok(Pool {})
        }
    }

    fn map<T, R, F>(&self, items: &[T], f: F) -> Result<Vec<R>>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> Result<R> + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            self.inner.install(|| items.par_iter().map(&f).collect())
        }
        #[cfg(not(feature = "parallel"))]
        {
            items.iter().map(f).collect()
        }
    }
}

/// Writes `contents` next to `path` and renames it into place, so a partly
/// written group is never mistaken for a finished one.
fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let tmp = path.with_extension("csv.tmp");
    fs::write(&tmp, contents).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn write_group(out: &Path, case: CaseSpec, label: &str, reports: &[RunReport]) -> Result<()> {
    for r in reports {
        let rows = r.convergence.iter().map(|t| vec![t.eff_evals_used.to_string(), format!("{:e}", t.best_eff)]);
        write_atomic(&convergence_path(out, &case, label, r.seed), &csv_bytes(&["eff_evals_used", "best_eff"], rows))?;
    }
    let rows = reports.iter().map(|r| vec![r.seed.to_string(), format!("{:e}", r.wall_secs)]);
    write_atomic(&timings_path(out, &case, label), &csv_bytes(&["seed", "wall_secs"], rows))?;
    let rows = reports.iter().map(|r| {
        vec![r.seed.to_string(), format!("{:e}", r.reported_eff), r.eff_evals.to_string(), r.raw_samples.to_string()]
    });
    write_atomic(&runs_path(out, &case, label), &csv_bytes(&["seed", "reported_eff", "eff_evals", "raw_samples"], rows))
}

fn write_skipped(out: &Path, skipped: &[(CaseSpec, String)]) -> Result<()> {
    let rows = skipped.iter().map(|(c, why)| vec![c.id(), why.clone()]);
    write_atomic(&out.join("skipped.csv"), &csv_bytes(&["case", "reason"], rows))
}

fn parse<T: std::str::FromStr>(path: &Path, field: Option<&str>) -> Result<T> {
    field
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| BenchError::Plan(format!("{}: malformed row", path.display())))
}

fn read_rows(path: &Path) -> Result<Vec<csv::StringRecord>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.records().collect::<std::result::Result<_, _>>().map_err(csv_err(path))
}

/// Reads one `runs/` file back. Convergence and timing files are optional.
pub fn load_group(out: &Path, case: CaseSpec, label: &str) -> Result<Vec<RunReport>> {
    let path = runs_path(out, &case, label);
    let timings: Vec<(u64, f64)> = match timings_path(out, &case, label) {
        p if p.exists() => read_rows(&p)?
            .iter()
            .map(|r| Ok((parse(&p, r.get(0))?, parse(&p, r.get(1))?)))
            .collect::<Result<_>>()?,
        _ => Vec::new(),
    };
    let mut reports = Vec::new();
    for row in read_rows(&path)? {
        let seed: u64 = parse(&path, row.get(0))?;
        let conv_path = convergence_path(out, &case, label, seed);
        let convergence = if conv_path.exists() {
            read_rows(&conv_path)?
                .iter()
                .map(|r| Ok(TracePoint { eff_evals_used: parse(&conv_path, r.get(0))?, best_eff: parse(&conv_path, r.get(1))? }))
                .collect::<Result<_>>()?
        } else {
            Vec::new()
        };
        reports.push(RunReport {
            case,
            algo: label.to_string(),
            seed,
            reported_eff: parse(&path, row.get(1))?,
            eff_evals: parse(&path, row.get(2))?,
            raw_samples: parse(&path, row.get(3))?,
            wall_secs: timings.iter().find(|t| t.0 == seed).map_or(0.0, |t| t.1),
            convergence,
        });
    }
    Ok(reports)
}

/// Every group found under `out/runs`, ordered by case then label.
pub fn load_all(out: &Path) -> Result<Vec<RunReport>> {
    let dir = out.join("runs");
    let mut groups = Vec::new();
    for entry in fs::read_dir(&dir).map_err(io_err(&dir))? {
        let name = entry.map_err(io_err(&dir))?.file_name().to_string_lossy().into_owned();
        let Some(stem) = name.strip_suffix(".csv") else { continue };
        let (case, label) = stem
            .split_once("__")
            .ok_or_else(|| BenchError::Plan(format!("unexpected file {name} in {}", dir.display())))?;
        groups.push((case.parse::<CaseSpec>()?, label.to_string()));
    }
    groups.sort();
    let mut reports = Vec::new();
    for (case, label) in groups {
        reports.extend(load_group(out, case, &label)?);
    }
    Ok(reports)
}
