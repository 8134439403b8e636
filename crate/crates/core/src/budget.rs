use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Evaluation accounting for one run.
///
/// `raw_evals` counts direct evaluations of the unperturbed objective and is
/// capped by `raw_cap`. `eff_evals` counts effective-fitness estimates and is
/// capped by `eff_cap`. Each estimate consumes several objective samples;
/// those are tallied in `raw_samples`, which has no cap of its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    raw_evals: u64,
    eff_evals: u64,
    raw_samples: u64,
    raw_cap: u64,
    eff_cap: u64,
}

impl Budget {
    pub fn new(raw_cap: u64, eff_cap: u64) -> Self {
        Budget { raw_evals: 0, eff_evals: 0, raw_samples: 0, raw_cap, eff_cap }
    }

    pub fn raw_only(raw_cap: u64) -> Self {
        Budget::new(raw_cap, 0)
    }

    pub fn eff_only(eff_cap: u64) -> Self {
        Budget::new(0, eff_cap)
    }

    pub fn raw_evals_used(&self) -> u64 {
        self.raw_evals
    }

    pub fn eff_evals_used(&self) -> u64 {
        self.eff_evals
    }

    pub fn raw_samples_used(&self) -> u64 {
        self.raw_samples
    }

    /// Direct evaluations plus samples consumed inside effective estimates.
    pub fn total_raw(&self) -> u64 {
        self.raw_evals + self.raw_samples
    }

    pub fn raw_cap(&self) -> u64 {
        self.raw_cap
    }

    pub fn eff_cap(&self) -> u64 {
        self.eff_cap
    }

    pub fn raw_remaining(&self) -> u64 {
        self.raw_cap - self.raw_evals
    }

    pub fn eff_remaining(&self) -> u64 {
        self.eff_cap - self.eff_evals
    }

    /// Reserves `n` raw evaluations, all or nothing.
    pub fn consume_raw(&mut self, n: u64) -> Result<()> {
        if n > self.raw_remaining() {
            return Err(Error::BudgetExhausted { counter: "raw", cap: self.raw_cap });
        }
        self.raw_evals += n;
        Ok(())
    }

    /// Reserves `n` effective-fitness evaluations, all or nothing.
    pub fn consume_eff(&mut self, n: u64) -> Result<()> {
        if n > self.eff_remaining() {
            return Err(Error::BudgetExhausted { counter: "effective", cap: self.eff_cap });
        }
        self.eff_evals += n;
        Ok(())
    }

    pub fn record_samples(&mut self, n: u64) {
        self.raw_samples += n;
    }

    /// Adds the counters of a finished sub-budget; caps are summed too.
    pub fn absorb(&mut self, other: &Budget) {
        self.raw_evals += other.raw_evals;
        self.eff_evals += other.eff_evals;
        self.raw_samples += other.raw_samples;
        self.raw_cap += other.raw_cap;
        self.eff_cap += other.eff_cap;
    }
}
