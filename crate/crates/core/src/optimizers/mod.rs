//! Differential-evolution engines.
//!
//! * [`stage1_ncde_run`]: neighborhood crowding DE on the raw objective,
//!   recording every generation into an [`Archive`](crate::Archive).
//! * [`stage2_guided_de_run`]: DE/rand-to-pbest/1/bin on the effective
//!   objective, with a detected peak as the guiding elite.
//! * [`baseline_run`]: CDE, NCDE and JADE directly on the effective objective.

mod cde;
mod guided;
mod jade;
mod ncde;
mod operators;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::objective::Objective;
use crate::rng::RngStream;
use crate::robustness::EffEstimatorConfig;
use crate::types::{BoundaryRepair, Individual};

pub use cde::cde_run;
pub use guided::{guided_de_loop, stage2_guided_de_run};
pub use jade::{jade_run, JadeState};
pub use ncde::{ncde_baseline_run, stage1_ncde_run};
pub use operators::{binomial_crossover, init_population, mutate_rand_1, mutate_rand_to_pbest};

/// Default neighborhood size for crowding: `max(5, N / 10)`.
pub fn default_neighborhood(pop_size: usize) -> usize {
    (pop_size / 10).max(5)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DEParams {
    pub f_scale: f64,
    pub cr: f64,
    pub pop_size: usize,
    /// Members in an NCDE neighborhood, the parent included.
    pub neighborhood: usize,
    #[serde(default)]
    pub repair: BoundaryRepair,
}

impl Default for DEParams {
    fn default() -> Self {
        DEParams { f_scale: 0.5, cr: 0.9, pop_size: 100, neighborhood: default_neighborhood(100), repair: BoundaryRepair::Clamp }
    }
}

impl DEParams {
    pub fn new(f_scale: f64, cr: f64, pop_size: usize) -> Result<Self> {
        let p = DEParams { f_scale, cr, pop_size, neighborhood: default_neighborhood(pop_size).min(pop_size), repair: BoundaryRepair::Clamp };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f_scale > 0.0 && self.f_scale <= 1.0) {
            return Err(Error::config(format!("F must lie in (0, 1], got {}", self.f_scale)));
        }
        if !(0.0..=1.0).contains(&self.cr) {
            return Err(Error::config(format!("CR must lie in [0, 1], got {}", self.cr)));
        }
        if self.pop_size < 4 {
            return Err(Error::config(format!("population size must be at least 4, got {}", self.pop_size)));
        }
        if self.neighborhood < 4 || self.neighborhood > self.pop_size {
            return Err(Error::config(format!(
                "neighborhood must lie in [4, {}], got {}",
                self.pop_size, self.neighborhood
            )));
        }
        Ok(())
    }
}

/// One convergence sample: evaluations spent so far and the best estimate held.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub eff_evals_used: u64,
    pub best_eff: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    /// Best member of the final population by its cached effective fitness.
    pub best: Individual,
    /// One point after initialization and one per generation.
    pub trace: Vec<TracePoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Cde,
    Ncde,
    Jade,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Cde, Algorithm::Ncde, Algorithm::Jade];
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Cde => "cde",
            Algorithm::Ncde => "ncde",
            Algorithm::Jade => "jade",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cde" => Ok(Algorithm::Cde),
            "ncde" => Ok(Algorithm::Ncde),
            "jade" => Ok(Algorithm::Jade),
            _ => Err(Error::config(format!("unknown baseline algorithm '{s}'"))),
        }
    }
}

/// Runs a baseline on the effective objective until `budget` can no longer
/// hold a full generation. The initial population is charged to the budget.
pub fn baseline_run<O: Objective>(
    algo: Algorithm,
    obj: &O,
    params: &DEParams,
    est: &EffEstimatorConfig,
    budget: &mut Budget,
    rng: &RngStream,
    exec: Executor,
) -> Result<SearchOutcome> {
    match algo {
        Algorithm::Cde => cde_run(obj, params, est, budget, rng, exec),
        Algorithm::Ncde => ncde_baseline_run(obj, params, est, budget, rng, exec),
        Algorithm::Jade => jade_run(obj, params, &JadeState::default(), est, budget, rng, exec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        let d = DEParams::default();
        assert_eq!((d.f_scale, d.cr, d.pop_size, d.neighborhood), (0.5, 0.9, 100, 10));
        assert!(d.validate().is_ok());
        assert!(DEParams::new(0.0, 0.9, 100).is_err());
        assert!(DEParams::new(1.5, 0.9, 100).is_err());
        assert!(DEParams::new(0.5, 1.1, 100).is_err());
        assert!(DEParams::new(0.5, 0.9, 3).is_err());
        assert_eq!(DEParams::new(0.5, 0.9, 4).unwrap().neighborhood, 4);
        assert_eq!(DEParams::new(0.5, 0.9, 300).unwrap().neighborhood, 30);
    }

    #[test]
    fn algorithm_names() {
        for a in Algorithm::ALL {
            assert_eq!(a.to_string().parse::<Algorithm>().unwrap(), a);
        }
        assert_eq!("JADE".parse::<Algorithm>().unwrap(), Algorithm::Jade);
        assert!(matches!("prpso".parse::<Algorithm>(), Err(Error::Config(_))));
    }
}
