use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::objective::Objective;
use crate::rng::{purpose, RngStream};
use crate::robustness::EffEstimatorConfig;
use crate::types::{argmax_first, DecisionVector, Individual};

use super::operators::{best_eff, distinct_indices, estimate_batch, finish_trial, init_population_eff, mutate_rand_to_pbest};
use super::{DEParams, SearchOutcome, TracePoint};

/// Peak-guided robust search from a fresh uniform population.
///
/// The initial population costs `pop_size` effective evaluations; a cap of
/// exactly that returns the best initial member.
pub fn stage2_guided_de_run<O: Objective>(
    obj: &O,
    peaks: &[DecisionVector],
    params: &DEParams,
    est: &EffEstimatorConfig,
    budget: &mut Budget,
    rng: &RngStream,
    exec: Executor,
) -> Result<SearchOutcome> {
    params.validate()?;
    est.validate()?;
    check_peaks(obj, peaks)?;
    let pop = init_population_eff(obj, params.pop_size, est, budget, rng, exec)?;
    guided_de_loop(obj, peaks, params, est, pop, budget, rng, exec)
}

fn check_peaks<O: Objective>(obj: &O, peaks: &[DecisionVector]) -> Result<()> {
    if peaks.is_empty() {
        return Err(Error::contract("guided search needs at least one peak"));
    }
    if let Some(p) = peaks.iter().find(|p| p.dim() != obj.dim()) {
        return Err(Error::DimensionMismatch { expected: obj.dim(), actual: p.dim() });
    }
    Ok(())
}

/// Generation loop on an already evaluated population. Runs while a full
/// generation of trials fits in the remaining effective budget.
#[allow(clippy::too_many_arguments)]
pub fn guided_de_loop<O: Objective>(
    obj: &O,
    peaks: &[DecisionVector],
    params: &DEParams,
    est: &EffEstimatorConfig,
    mut pop: Vec<Individual>,
    budget: &mut Budget,
    rng: &RngStream,
    exec: Executor,
) -> Result<SearchOutcome> {
    check_peaks(obj, peaks)?;
    let n = pop.len();
    if n < 4 {
        return Err(Error::contract("guided search needs at least 4 individuals"));
    }
    if pop.iter().any(|p| p.eff_fitness.is_none()) {
        return Err(Error::contract("population must carry effective fitness"));
    }
    let bounds = obj.bounds();
    let gen_stream = rng.child(purpose::GENERATION);
    let mut trace = vec![TracePoint { eff_evals_used: budget.eff_evals_used(), best_eff: best_eff(&pop) }];

    let mut g: u64 = 0;
    while budget.eff_remaining() >= n as u64 {
        let trials: Vec<DecisionVector> = exec.map(n, |i| {
            let mut r = gen_stream.child2(g, i as u64);
            let rp = &peaks[r.index(peaks.len())];
            let idx = distinct_indices(n, i, 3, &mut r);
            let v = mutate_rand_to_pbest(&pop[idx[0]].x, rp, &pop[idx[1]].x, &pop[idx[2]].x, params.f_scale);
            finish_trial(&pop[i].x, v, params.cr, bounds, params.repair, &mut r)
        });
        let eval = gen_stream.child2(g, u64::MAX);
        let fits = estimate_batch(obj, &trials, est, |i| eval.child(i as u64), budget, exec)?;
        for ((p, x), f) in pop.iter_mut().zip(trials).zip(fits) {
            if f.value() > p.eff() {
                *p = Individual::with_eff(x, f);
            }
        }
        trace.push(TracePoint { eff_evals_used: budget.eff_evals_used(), best_eff: best_eff(&pop) });
        g += 1;
    }

    let best = argmax_first(&pop, Individual::eff).expect("non-empty population");
    Ok(SearchOutcome { best: pop.swap_remove(best), trace })
}
