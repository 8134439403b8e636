//! Monte-Carlo estimation of the mean effective objective
//! `f_eff(x) = E_delta[ f(x + delta) ]` over the problem's perturbation box.

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::objective::Objective;
use crate::rng::RngStream;
use crate::types::{DecisionVector, Fitness};

/// What happens to a perturbed sample `x + delta` that leaves the box.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleBoundary {
    /// Evaluate it where it landed; every objective is defined on all of `R^D`.
    #[default]
    Unrepaired,
    /// Apply reflect-then-clamp first, as for mutants.
    Reflect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EffEstimatorConfig {
    /// Samples per estimate during selection (`H`).
    pub samples_per_eval: usize,
    /// Samples for the final reported estimate (`M`).
    pub report_samples: usize,
    #[serde(default)]
    pub boundary: SampleBoundary,
}

impl Default for EffEstimatorConfig {
    fn default() -> Self {
        EffEstimatorConfig { samples_per_eval: 100, report_samples: 100_000, boundary: SampleBoundary::Unrepaired }
    }
}

impl EffEstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples_per_eval == 0 {
            return Err(Error::config("samples_per_eval must be at least 1"));
        }
        if self.report_samples < self.samples_per_eval {
            return Err(Error::config("report_samples must be at least samples_per_eval"));
        }
        Ok(())
    }
}

/// One budgeted estimate of `f_eff(x)` from `n_samples` fresh perturbations.
/// Consumes one effective evaluation and records `n_samples` raw samples.
pub fn effective_fitness<O: Objective>(
    obj: &O,
    x: &DecisionVector,
    n_samples: usize,
    boundary: SampleBoundary,
    rng: &mut RngStream,
    budget: &mut Budget,
) -> Result<Fitness> {
    if x.dim() != obj.dim() {
        return Err(Error::DimensionMismatch { expected: obj.dim(), actual: x.dim() });
    }
    if n_samples == 0 {
        return Err(Error::contract("effective fitness needs at least one sample"));
    }
    if !obj.bounds().contains(x) {
        return Err(Error::contract("effective fitness requested outside the search box"));
    }
    budget.consume_eff(1)?;
    let v = perturbed_mean(obj, x, n_samples, boundary, rng);
    budget.record_samples(n_samples as u64);
    Fitness::new(v)
}

/// The unbudgeted estimator core.
///
/// Uses a running mean (`m += (v - m) / k`), which returns a constant
/// objective's value bit-for-bit.
pub fn perturbed_mean<O: Objective>(
    obj: &O,
    x: &[f64],
    n_samples: usize,
    boundary: SampleBoundary,
    rng: &mut RngStream,
) -> f64 {
    let h = obj.perturbation_halfwidth();
    let bounds = obj.bounds();
    let mut y = vec![0.0; x.len()];
    let mut mean = 0.0;
    for k in 1..=n_samples {
        for ((yi, &xi), &hi) in y.iter_mut().zip(x).zip(h) {
            *yi = xi + hi * (2.0 * rng.unit() - 1.0);
        }
        if boundary == SampleBoundary::Reflect {
            bounds.repair_in_place(&mut y);
        }
        let v = obj.value(&y);
        mean += (v - mean) / k as f64;
    }
    mean
}

const REPORT_CHUNK: usize = 4096;

/// High-fidelity estimate for reporting. Runs outside any budget; splits the
/// samples into fixed-size chunks, each on its own child stream of `stream`,
/// so the value is the same on every executor.
pub fn report_effective_fitness<O: Objective>(
    obj: &O,
    x: &DecisionVector,
    n_samples: usize,
    boundary: SampleBoundary,
    stream: &RngStream,
    exec: Executor,
) -> Result<Fitness> {
    if x.dim() != obj.dim() {
        return Err(Error::DimensionMismatch { expected: obj.dim(), actual: x.dim() });
    }
    if n_samples == 0 {
        return Err(Error::contract("effective fitness needs at least one sample"));
    }
    let chunks = n_samples.div_ceil(REPORT_CHUNK);
    let partial = exec.map(chunks, |c| {
        let len = REPORT_CHUNK.min(n_samples - c * REPORT_CHUNK);
        let mut rng = stream.child(c as u64);
        (len, perturbed_mean(obj, x, len, boundary, &mut rng))
    });
    let mut seen = 0usize;
    let mut mean = 0.0;
    for (len, m) in partial {
        seen += len;
        mean += (m - mean) * (len as f64 / seen as f64);
    }
    Fitness::new(mean)
}
