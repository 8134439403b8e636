use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::objective::Objective;
use crate::rng::RngStream;
use crate::robustness::{perturbed_mean, EffEstimatorConfig};
use crate::types::{squared_distance, BoundaryRepair, Bounds, DecisionVector, Fitness, Individual};

/// `n` individuals drawn uniformly inside `bounds`, fitness unset.
pub fn init_population(bounds: &Bounds, n: usize, rng: &mut RngStream) -> Vec<Individual> {
    (0..n)
        .map(|_| {
            let x = bounds.lower().iter().zip(bounds.upper()).map(|(&lo, &hi)| lo + (hi - lo) * rng.unit()).collect();
            Individual::new(DecisionVector::from_finite(x))
        })
        .collect()
}

/// `x_r1 + F (x_rp - x_r1) + F (x_r2 - x_r3)`, before any bound repair.
pub fn mutate_rand_to_pbest(
    x_r1: &DecisionVector,
    x_rp: &DecisionVector,
    x_r2: &DecisionVector,
    x_r3: &DecisionVector,
    f_scale: f64,
) -> DecisionVector {
    let v = (0..x_r1.dim()).map(|j| x_r1[j] + f_scale * (x_rp[j] - x_r1[j]) + f_scale * (x_r2[j] - x_r3[j])).collect();
    DecisionVector::from_finite(v)
}

/// `x_r1 + F (x_r2 - x_r3)`.
pub fn mutate_rand_1(x_r1: &DecisionVector, x_r2: &DecisionVector, x_r3: &DecisionVector, f_scale: f64) -> DecisionVector {
    let v = (0..x_r1.dim()).map(|j| x_r1[j] + f_scale * (x_r2[j] - x_r3[j])).collect();
    DecisionVector::from_finite(v)
}

/// Takes `mutant[j]` where a uniform draw is below `cr` or `j` is the forced
/// index, `target[j]` elsewhere.
pub fn binomial_crossover(target: &DecisionVector, mutant: &DecisionVector, cr: f64, rng: &mut RngStream) -> DecisionVector {
    let d = target.dim();
    let j_rand = rng.index(d);
    let u = (0..d).map(|j| if rng.unit() < cr || j == j_rand { mutant[j] } else { target[j] }).collect();
    DecisionVector::from_finite(u)
}

/// Mutant repair and crossover shared by every engine.
pub(crate) fn finish_trial(
    target: &DecisionVector,
    mut mutant: DecisionVector,
    cr: f64,
    bounds: &Bounds,
    repair: BoundaryRepair,
    rng: &mut RngStream,
) -> DecisionVector {
    bounds.repair_with(repair, mutant.as_mut_slice());
    binomial_crossover(target, &mutant, cr, rng)
}

/// `k` distinct draws from `pool`, none equal to `exclude`. `pool` must hold
/// at least `k` values other than `exclude`.
pub(crate) fn distinct_from(pool: &[usize], exclude: usize, k: usize, rng: &mut RngStream) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    while out.len() < k {
        let c = pool[rng.index(pool.len())];
        if c != exclude && !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

/// Like [`distinct_from`] over `0..n`.
pub(crate) fn distinct_indices(n: usize, exclude: usize, k: usize, rng: &mut RngStream) -> Vec<usize> {
    debug_assert!(n > k);
    let mut out = Vec::with_capacity(k);
    while out.len() < k {
        let c = rng.index(n);
        if c != exclude && !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

/// Index of the member of `among` nearest to `x`, first on ties.
pub(crate) fn nearest(pop: &[Individual], among: impl IntoIterator<Item = usize>, x: &[f64]) -> usize {
    let mut best = (usize::MAX, f64::INFINITY);
    for i in among {
        let d = squared_distance(&pop[i].x, x);
        if d < best.1 {
            best = (i, d);
        }
    }
    best.0
}

/// `parent` followed by its `m - 1` nearest other members, by distance then index.
pub(crate) fn neighborhood(pop: &[Individual], parent: usize, m: usize) -> Vec<usize> {
    let x = &pop[parent].x;
    let mut others: Vec<(f64, usize)> =
        (0..pop.len()).filter(|&j| j != parent).map(|j| (squared_distance(x, &pop[j].x), j)).collect();
    let k = (m - 1).min(others.len());
    if k < others.len() {
        others.select_nth_unstable_by(k, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    }
    others.truncate(k);
    others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    std::iter::once(parent).chain(others.into_iter().map(|(_, j)| j)).collect()
}

/// Estimates `f_eff` for every point, each on its own stream from `stream_of`.
/// The whole batch is charged up front, all or nothing.
pub(crate) fn estimate_batch<O, S>(
    obj: &O,
    xs: &[DecisionVector],
    est: &EffEstimatorConfig,
    stream_of: S,
    budget: &mut Budget,
    exec: Executor,
) -> Result<Vec<Fitness>>
where
    O: Objective,
    S: Fn(usize) -> RngStream + Sync + Send,
{
    if let Some(x) = xs.iter().find(|x| !obj.bounds().contains(x)) {
        return Err(Error::contract(format!("trial {:?} lies outside the search box", x.as_slice())));
    }
    budget.consume_eff(xs.len() as u64)?;
    budget.record_samples((xs.len() * est.samples_per_eval) as u64);
    let h = est.samples_per_eval;
    let boundary = est.boundary;
    exec.map(xs.len(), |i| perturbed_mean(obj, &xs[i], h, boundary, &mut stream_of(i)))
        .into_iter()
        .map(Fitness::new)
        .collect()
}

/// Fresh population with cached effective fitness.
pub(crate) fn init_population_eff<O: Objective>(
    obj: &O,
    n: usize,
    est: &EffEstimatorConfig,
    budget: &mut Budget,
    rng: &RngStream,
    exec: Executor,
) -> Result<Vec<Individual>> {
    use crate::rng::purpose;
    let mut pop = init_population(obj.bounds(), n, &mut rng.child(purpose::INIT));
    let xs: Vec<DecisionVector> = pop.iter().map(|p| p.x.clone()).collect();
    let eval = rng.child(purpose::INIT_EVAL);
    let fits = estimate_batch(obj, &xs, est, |i| eval.child(i as u64), budget, exec)?;
    for (p, f) in pop.iter_mut().zip(fits) {
        p.eff_fitness = Some(f);
    }
    Ok(pop)
}

pub(crate) fn best_eff(pop: &[Individual]) -> f64 {
    pop.iter().map(Individual::eff).fold(f64::NEG_INFINITY, f64::max)
}
