//! Experiment plans: which cases, which algorithms, how many seeded runs.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use drea_core::{stage_caps, Algorithm, ProblemId, ProblemSpec};
use serde::{Deserialize, Serialize};

use crate::error::{io_err, BenchError, Result};

/// Algorithm column of a plan: the two-stage method or one of the baselines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum AlgoId {
    Drea,
    Baseline(Algorithm),
}

impl AlgoId {
    pub const ALL: [AlgoId; 4] = [
        AlgoId::Drea,
        AlgoId::Baseline(Algorithm::Cde),
        AlgoId::Baseline(Algorithm::Ncde),
        AlgoId::Baseline(Algorithm::Jade),
    ];
}

impl fmt::Display for AlgoId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgoId::Drea => f.write_str("drea"),
            AlgoId::Baseline(a) => a.fmt(f),
        }
    }
}

impl FromStr for AlgoId {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("drea") {
            return Ok(AlgoId::Drea);
        }
        s.parse::<Algorithm>().map(AlgoId::Baseline).map_err(|_| BenchError::Plan(format!("unknown algorithm '{s}'")))
    }
}

impl TryFrom<String> for AlgoId {
    type Error = BenchError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<AlgoId> for String {
    fn from(a: AlgoId) -> String {
        a.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CaseSpec {
    pub problem: ProblemId,
    pub dim: usize,
}

impl CaseSpec {
    pub fn new(problem: ProblemId, dim: usize) -> Self {
        CaseSpec { problem, dim }
    }

    /// File-name friendly id, e.g. `f2-10d`.
    pub fn id(&self) -> String {
        format!("{}-{}d", self.problem, self.dim)
    }
}

impl FromStr for CaseSpec {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || BenchError::Plan(format!("malformed case id '{s}'"));
        let (p, d) = s.split_once('-').ok_or_else(bad)?;
        let dim = d.strip_suffix('d').and_then(|d| d.parse().ok()).ok_or_else(bad)?;
        Ok(CaseSpec { problem: p.parse().map_err(|_| bad())?, dim })
    }
}

impl fmt::Display for CaseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimBudget {
    pub dim: usize,
    pub stage1: u64,
    pub stage2: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub cases: Vec<CaseSpec>,
    pub algorithms: Vec<AlgoId>,
    pub repetitions: usize,
    pub base_seed: u64,
    /// Overrides of the standard stage caps, per dimension.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub budgets: Vec<DimBudget>,
    /// When set, DREA runs once per listed peak count instead of once.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub np_sweep: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Profile {
    Paper,
    Desk,
}

const STANDARD_DIMS: [usize; 3] = [10, 15, 20];
const DEFAULT_SEED: u64 = 1;

impl ExperimentPlan {
    /// All six problems at 10/15/20-D, DREA and the three baselines, 30 runs,
    /// standard budgets.
    pub fn paper() -> Self {
        let cases = STANDARD_DIMS.iter().flat_map(|&d| ProblemId::ALL.map(|p| CaseSpec::new(p, d))).collect();
        ExperimentPlan {
            cases,
            algorithms: AlgoId::ALL.to_vec(),
            repetitions: 30,
            base_seed: DEFAULT_SEED,
            budgets: Vec::new(),
            np_sweep: None,
        }
    }

    /// Reduced plan for quick checks: 10-D only, 10 runs, a third of the
    /// standard budgets.
    pub fn desk() -> Self {
        let (s1, s2) = stage_caps(10).expect("10-D has standard caps");
        ExperimentPlan {
            cases: ProblemId::ALL.map(|p| CaseSpec::new(p, 10)).to_vec(),
            algorithms: AlgoId::ALL.to_vec(),
            repetitions: 10,
            base_seed: DEFAULT_SEED,
            budgets: vec![DimBudget { dim: 10, stage1: s1 / 3, stage2: s2 / 3 }],
            np_sweep: None,
        }
    }

    pub fn profile(p: Profile) -> Self {
        match p {
            Profile::Paper => ExperimentPlan::paper(),
            Profile::Desk => ExperimentPlan::desk(),
        }
    }

    /// DREA alone with N_p = 1..=5 on the 18 standard cases.
    pub fn np_sweep() -> Self {
        ExperimentPlan { algorithms: vec![AlgoId::Drea], np_sweep: Some((1..=5).collect()), ..ExperimentPlan::paper() }
    }

    /// F2-F6 at 100-D and 200-D against every baseline. F1 is left out as
    /// its robust optimum is not known.
    pub fn scale() -> Self {
        let cases = [100, 200]
            .iter()
            .flat_map(|&d| ProblemId::ALL[1..].iter().map(move |&p| CaseSpec::new(p, d)))
            .collect();
        ExperimentPlan { cases, ..ExperimentPlan::paper() }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let plan: ExperimentPlan = toml::from_str(text).map_err(|e| BenchError::Plan(e.to_string()))?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        ExperimentPlan::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("plan serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(BenchError::Plan("repetitions must be at least 1".into()));
        }
        if self.cases.is_empty() || self.algorithms.is_empty() {
            return Err(BenchError::Plan("plan needs at least one case and one algorithm".into()));
        }
        if let Some(sweep) = &self.np_sweep {
            if sweep.is_empty() || sweep.contains(&0) {
                return Err(BenchError::Plan("N_p sweep values must be positive".into()));
            }
        }
        for b in &self.budgets {
            if self.budgets.iter().filter(|o| o.dim == b.dim).count() > 1 {
                return Err(BenchError::Plan(format!("duplicate budget entry for {}-D", b.dim)));
            }
        }
        Ok(())
    }

    /// `(stage-1 raw, stage-2 effective)` caps for a dimension.
    pub fn budget_for(&self, dim: usize) -> Result<(u64, u64)> {
        match self.budgets.iter().find(|b| b.dim == dim) {
            Some(b) => Ok((b.stage1, b.stage2)),
            None => Ok(stage_caps(dim)?),
        }
    }

    /// Reason a case cannot run, if any.
    pub fn unresolvable(&self, case: &CaseSpec) -> Option<String> {
        if let Err(e) = ProblemSpec::new(case.problem, case.dim) {
            return Some(e.to_string());
        }
        self.budget_for(case.dim).err().map(|e| e.to_string())
    }

    /// Seed of run `index` (0-based).
    pub fn seed(&self, index: usize) -> u64 {
        self.base_seed.wrapping_add(index as u64)
    }

    /// Every (algorithm label, variant) column of the plan, sweep expanded.
    pub fn variants(&self) -> Vec<Variant> {
        let mut out = Vec::new();
        for &algo in &self.algorithms {
            match (algo, &self.np_sweep) {
                (AlgoId::Drea, Some(sweep)) => out.extend(sweep.iter().map(|&np| Variant { algo, n_p: Some(np) })),
                _ => out.push(Variant { algo, n_p: None }),
            }
        }
        out
    }
}

/// An algorithm as run: DREA may carry a peak-count override.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variant {
    pub algo: AlgoId,
    pub n_p: Option<usize>,
}

impl Variant {
    pub fn label(&self) -> String {
        match self.n_p {
            Some(np) => format!("{}-np{np}", self.algo),
            None => self.algo.to_string(),
        }
    }
}
