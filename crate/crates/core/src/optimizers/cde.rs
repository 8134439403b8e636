use crate::budget::Budget;
use crate::error::Result;
use crate::exec::Executor;
use crate::objective::Objective;
use crate::rng::{purpose, RngStream};
use crate::robustness::EffEstimatorConfig;
use crate::types::{argmax_first, DecisionVector, Individual};

use super::operators::{best_eff, distinct_indices, estimate_batch, finish_trial, init_population_eff, mutate_rand_1, nearest};
use super::{DEParams, SearchOutcome, TracePoint};

/// Crowding DE on the effective objective: DE/rand/1/bin over the whole
/// population, each trial competing with its nearest member.
pub fn cde_run<O: Objective>(
    obj: &O,
    params: &DEParams,
    est: &EffEstimatorConfig,
    budget: &mut Budget,
    rng: &RngStream,
    exec: Executor,
) -> Result<SearchOutcome> {
    params.validate()?;
    est.validate()?;
    let n = params.pop_size;
    let bounds = obj.bounds();
    let mut pop = init_population_eff(obj, n, est, budget, rng, exec)?;
    let gen_stream = rng.child(purpose::GENERATION);
    let mut trace = vec![TracePoint { eff_evals_used: budget.eff_evals_used(), best_eff: best_eff(&pop) }];

    let mut g: u64 = 0;
    while budget.eff_remaining() >= n as u64 {
        let trials: Vec<DecisionVector> = exec.map(n, |i| {
            let mut r = gen_stream.child2(g, i as u64);
            let idx = distinct_indices(n, i, 3, &mut r);
            let v = mutate_rand_1(&pop[idx[0]].x, &pop[idx[1]].x, &pop[idx[2]].x, params.f_scale);
            finish_trial(&pop[i].x, v, params.cr, bounds, params.repair, &mut r)
        });
        let eval = gen_stream.child2(g, u64::MAX);
        let fits = estimate_batch(obj, &trials, est, |i| eval.child(i as u64), budget, exec)?;
        for (u, f) in trials.into_iter().zip(fits) {
            let target = nearest(&pop, 0..n, &u);
            if f.value() > pop[target].eff() {
                pop[target] = Individual::with_eff(u, f);
            }
        }
        trace.push(TracePoint { eff_evals_used: budget.eff_evals_used(), best_eff: best_eff(&pop) });
        g += 1;
    }

    let best = argmax_first(&pop, Individual::eff).expect("non-empty population");
    Ok(SearchOutcome { best: pop.swap_remove(best), trace })
}
