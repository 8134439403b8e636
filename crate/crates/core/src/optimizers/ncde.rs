use crate::archive::Archive;
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::objective::Objective;
use crate::rng::{purpose, RngStream};
use crate::robustness::EffEstimatorConfig;
use crate::types::{argmax_first, DecisionVector, Fitness, Individual};

use super::operators::{
    best_eff, distinct_from, estimate_batch, finish_trial, init_population, init_population_eff, mutate_rand_1, nearest,
    neighborhood,
};
use super::{DEParams, SearchOutcome, TracePoint};

fn raw_eval<O: Objective>(obj: &O, x: &DecisionVector) -> Result<Fitness> {
    Fitness::new(obj.value(x))
}

/// Neighborhood crowding DE on the unperturbed objective.
///
/// Offspring are produced one parent at a time: DE/rand/1 from the parent's
/// neighborhood, then the offspring replaces its nearest neighborhood member
/// if strictly better. The initial population and every later generation go
/// into the archive. Generations run while a whole one fits in `raw_cap`.
pub fn stage1_ncde_run<O: Objective>(
    obj: &O,
    params: &DEParams,
    budget: &mut Budget,
    rng: &RngStream,
) -> Result<Archive> {
    params.validate()?;
    let n = params.pop_size;
    if budget.raw_remaining() < n as u64 {
        return Err(Error::BudgetExhausted { counter: "raw", cap: budget.raw_cap() });
    }
    let bounds = obj.bounds();
    let mut pop = init_population(bounds, n, &mut rng.child(purpose::INIT));
    budget.consume_raw(n as u64)?;
    for p in &mut pop {
        p.raw_fitness = Some(raw_eval(obj, &p.x)?);
    }
    let generations = budget.raw_remaining() / n as u64;
    let mut archive = Archive::with_capacity(n * (generations as usize + 1));
    archive.record_generation(&pop)?;

    let mut r = rng.child(purpose::GENERATION);
    for _ in 0..generations {
        budget.consume_raw(n as u64)?;
        for i in 0..n {
            let hood = neighborhood(&pop, i, params.neighborhood);
            let idx = distinct_from(&hood, i, 3, &mut r);
            let v = mutate_rand_1(&pop[idx[0]].x, &pop[idx[1]].x, &pop[idx[2]].x, params.f_scale);
            let u = finish_trial(&pop[i].x, v, params.cr, bounds, params.repair, &mut r);
            let fu = raw_eval(obj, &u)?;
            let target = nearest(&pop, hood.iter().copied(), &u);
            if fu.value() > pop[target].raw() {
                pop[target] = Individual::with_raw(u, fu);
            }
        }
        archive.record_generation(&pop)?;
    }
    Ok(archive)
}

/// NCDE on the effective objective. Trials of one generation are built and
/// estimated together, then applied in index order; each replaces its nearest
/// member within the neighborhood it was bred from, if strictly better.
pub fn ncde_baseline_run<O: Objective>(
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
        let bred: Vec<(Vec<usize>, DecisionVector)> = exec.map(n, |i| {
            let mut r = gen_stream.child2(g, i as u64);
            let hood = neighborhood(&pop, i, params.neighborhood);
            let idx = distinct_from(&hood, i, 3, &mut r);
            let v = mutate_rand_1(&pop[idx[0]].x, &pop[idx[1]].x, &pop[idx[2]].x, params.f_scale);
            let u = finish_trial(&pop[i].x, v, params.cr, bounds, params.repair, &mut r);
            (hood, u)
        });
        let trials: Vec<DecisionVector> = bred.iter().map(|(_, u)| u.clone()).collect();
        let eval = gen_stream.child2(g, u64::MAX);
        let fits = estimate_batch(obj, &trials, est, |i| eval.child(i as u64), budget, exec)?;
        for ((hood, u), f) in bred.into_iter().zip(fits) {
            let target = nearest(&pop, hood, &u);
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::FnObjective;
    use crate::types::Bounds;

    fn bump(c: f64) -> impl Fn(&[f64]) -> f64 + Sync {
        move |x: &[f64]| (-x.iter().map(|v| (v - c) * (v - c)).sum::<f64>()).exp()
    }

    #[test]
    fn archive_size_matches_cap() {
        let obj = FnObjective::new(Bounds::uniform(10, 0.0, 1.0).unwrap(), 0.0, bump(0.3));
        let mut b = Budget::raw_only(10_000);
        let a = stage1_ncde_run(&obj, &DEParams::default(), &mut b, &RngStream::new(1, 1)).unwrap();
        assert_eq!(a.len(), 10_000);
        assert_eq!(b.raw_evals_used(), 10_000);

        let mut odd = Budget::raw_only(10_050);
        let a = stage1_ncde_run(&obj, &DEParams::default(), &mut odd, &RngStream::new(1, 1)).unwrap();
        assert_eq!(a.len(), 10_000);
        assert_eq!(odd.raw_remaining(), 50);
    }

    #[test]
    fn unimodal_bump_is_found() {
        let obj = FnObjective::new(Bounds::uniform(5, 0.0, 10.0).unwrap(), 0.0, bump(6.0));
        let mut b = Budget::raw_only(10_000);
        let a = stage1_ncde_run(&obj, &DEParams::default(), &mut b, &RngStream::new(2, 2)).unwrap();
        assert!(a.best().unwrap().x.iter().all(|v| (v - 6.0).abs() < 0.1));
    }

    #[test]
    fn two_bumps_both_kept() {
        let f = |x: &[f64]| {
            let g = |c: f64, s: f64| (-x.iter().map(|v| (v - c) * (v - c)).sum::<f64>() / s).exp();
            g(2.0, 1.0) + 0.8 * g(8.0, 1.0)
        };
        let obj = FnObjective::new(Bounds::uniform(2, 0.0, 10.0).unwrap(), 0.0, f);
        let mut b = Budget::raw_only(10_000);
        let a = stage1_ncde_run(&obj, &DEParams::default(), &mut b, &RngStream::new(3, 3)).unwrap();
        let fs: Vec<f64> = a.entries().iter().map(|e| e.f.value()).collect();
        assert!(fs.iter().any(|&v| v >= 0.95 * 1.0));
        assert!(a.entries().iter().any(|e| e.x.iter().all(|v| (v - 8.0).abs() < 1.0) && e.f.value() >= 0.95 * 0.8));
    }

    #[test]
    fn too_small_budget_is_an_error() {
        let obj = FnObjective::new(Bounds::uniform(2, 0.0, 1.0).unwrap(), 0.0, bump(0.5));
        let mut b = Budget::raw_only(99);
        assert!(stage1_ncde_run(&obj, &DEParams::default(), &mut b, &RngStream::new(0, 0)).unwrap_err().is_budget_exhausted());
    }

    #[test]
    fn baseline_improves_and_agrees_across_executors() {
        let obj = FnObjective::new(Bounds::uniform(3, 0.0, 1.0).unwrap(), 0.01, bump(0.4));
        let est = EffEstimatorConfig { samples_per_eval: 4, ..Default::default() };
        let params = DEParams { pop_size: 20, neighborhood: 5, ..DEParams::default() };
        let runs: Vec<_> = Executor::available()
            .into_iter()
            .map(|e| {
                let mut b = Budget::eff_only(20 * 40);
                ncde_baseline_run(&obj, &params, &est, &mut b, &RngStream::new(5, 5), e).unwrap()
            })
            .collect();
        assert!(runs.windows(2).all(|w| w[0] == w[1]));
        let t = &runs[0].trace;
        assert_eq!(t.len(), 40);
        assert!(t.windows(2).all(|w| w[1].best_eff >= w[0].best_eff));
        assert!(t.last().unwrap().best_eff > t[0].best_eff);
    }
}
