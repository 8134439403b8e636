use rand_distr::{Cauchy, Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::objective::Objective;
use crate::rng::{purpose, RngStream};
use crate::robustness::EffEstimatorConfig;
use crate::types::{argmax_first, DecisionVector, Individual};

use super::operators::{best_eff, distinct_indices, estimate_batch, finish_trial, init_population_eff};
use super::{DEParams, SearchOutcome, TracePoint};

/// Adaptive parameter state of JADE (no external archive).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JadeState {
    pub mu_f: f64,
    pub mu_cr: f64,
    pub adaptation_rate: f64,
    pub p_best_fraction: f64,
}

impl Default for JadeState {
    fn default() -> Self {
        JadeState { mu_f: 0.5, mu_cr: 0.5, adaptation_rate: 0.1, p_best_fraction: 0.05 }
    }
}

impl JadeState {
    pub fn validate(&self) -> Result<()> {
        let unit = 0.0..=1.0;
        if !unit.contains(&self.mu_f) || !unit.contains(&self.mu_cr) {
            return Err(Error::config("JADE means must lie in [0, 1]"));
        }
        if !(self.adaptation_rate > 0.0 && self.adaptation_rate <= 1.0) {
            return Err(Error::config("JADE adaptation rate must lie in (0, 1]"));
        }
        if !(self.p_best_fraction > 0.0 && self.p_best_fraction <= 1.0) {
            return Err(Error::config("JADE p-best fraction must lie in (0, 1]"));
        }
        Ok(())
    }

    /// Draws `(F, CR)` for one individual.
    pub fn sample(&self, rng: &mut RngStream) -> (f64, f64) {
        let cauchy = Cauchy::new(self.mu_f, 0.1).expect("positive scale");
        let f = loop {
            let f = cauchy.sample(rng);
            if f > 0.0 {
                break f.min(1.0);
            }
        };
        let cr = Normal::new(self.mu_cr, 0.1).expect("positive sd").sample(rng).clamp(0.0, 1.0);
        (f, cr)
    }

    /// Moves the means toward the successful values of one generation.
    pub fn update(&mut self, good_f: &[f64], good_cr: &[f64]) {
        let c = self.adaptation_rate;
        if !good_cr.is_empty() {
            let mean = good_cr.iter().sum::<f64>() / good_cr.len() as f64;
            self.mu_cr = (1.0 - c) * self.mu_cr + c * mean;
        }
        let sum: f64 = good_f.iter().sum();
        if sum > 0.0 {
            let lehmer = good_f.iter().map(|f| f * f).sum::<f64>() / sum;
            self.mu_f = (1.0 - c) * self.mu_f + c * lehmer;
        }
    }
}

/// JADE with DE/current-to-pbest/1/bin on the effective objective.
pub fn jade_run<O: Objective>(
    obj: &O,
    params: &DEParams,
    state: &JadeState,
    est: &EffEstimatorConfig,
    budget: &mut Budget,
    rng: &RngStream,
    exec: Executor,
) -> Result<SearchOutcome> {
    params.validate()?;
    est.validate()?;
    state.validate()?;
    let mut state = *state;
    let n = params.pop_size;
    let bounds = obj.bounds();
    let top = ((state.p_best_fraction * n as f64).ceil() as usize).clamp(1, n);
    let mut pop = init_population_eff(obj, n, est, budget, rng, exec)?;
    let gen_stream = rng.child(purpose::GENERATION);
    let mut trace = vec![TracePoint { eff_evals_used: budget.eff_evals_used(), best_eff: best_eff(&pop) }];

    let mut g: u64 = 0;
    while budget.eff_remaining() >= n as u64 {
        let mut ranked: Vec<usize> = (0..n).collect();
        ranked.sort_by(|&a, &b| pop[b].eff().total_cmp(&pop[a].eff()));
        let elite = &ranked[..top];

        let bred: Vec<(f64, f64, DecisionVector)> = exec.map(n, |i| {
            let mut r = gen_stream.child2(g, i as u64);
            let (f, cr) = state.sample(&mut r);
            let pbest = &pop[elite[r.index(top)]].x;
            let idx = distinct_indices(n, i, 2, &mut r);
            let xi = &pop[i].x;
            let (x1, x2) = (&pop[idx[0]].x, &pop[idx[1]].x);
            let v = (0..xi.dim()).map(|j| xi[j] + f * (pbest[j] - xi[j]) + f * (x1[j] - x2[j])).collect();
            (f, cr, finish_trial(xi, DecisionVector::new(v).expect("finite"), cr, bounds, params.repair, &mut r))
        });
        let trials: Vec<DecisionVector> = bred.iter().map(|(_, _, u)| u.clone()).collect();
        let eval = gen_stream.child2(g, u64::MAX);
        let fits = estimate_batch(obj, &trials, est, |i| eval.child(i as u64), budget, exec)?;

        let (mut good_f, mut good_cr) = (Vec::new(), Vec::new());
        for (i, ((f, cr, u), fu)) in bred.into_iter().zip(fits).enumerate() {
            if fu.value() > pop[i].eff() {
                pop[i] = Individual::with_eff(u, fu);
                good_f.push(f);
                good_cr.push(cr);
            }
        }
        state.update(&good_f, &good_cr);
        trace.push(TracePoint { eff_evals_used: budget.eff_evals_used(), best_eff: best_eff(&pop) });
        g += 1;
    }

    let best = argmax_first(&pop, Individual::eff).expect("non-empty population");
    Ok(SearchOutcome { best: pop.swap_remove(best), trace })
}
