//! Per-cell mean/std and significance marks against the reference algorithm.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{io_err, Result};
use crate::plan::CaseSpec;
use crate::runner::RunReport;
use crate::stats::{mean, sample_std, wilcoxon_rank_sum, Verdict};

/// Significance level of every comparison.
pub const ALPHA: f64 = 0.05;

/// Label the other columns are compared against.
pub const REFERENCE: &str = "drea";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mark {
    /// The column beats the reference.
    Better,
    Same,
    Worse,
}

impl Mark {
    pub fn symbol(self) -> &'static str {
        match self {
            Mark::Better => "+",
            Mark::Same => "≈",
            Mark::Worse => "−",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    /// `None` for the reference column and when there is nothing to compare.
    pub mark: Option<Mark>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    /// Cases ordered by dimension, then problem.
    pub cases: Vec<CaseSpec>,
    /// Reference first, then the remaining labels sorted.
    pub algos: Vec<String>,
    pub cells: BTreeMap<(CaseSpec, String), Cell>,
}

impl Summary {
    /// `(better, same, worse)` counts of one column against the reference.
    pub fn tally(&self, algo: &str) -> (usize, usize, usize) {
        let mut t = (0, 0, 0);
        for ((_, a), cell) in &self.cells {
            match (a == algo, cell.mark) {
                (true, Some(Mark::Better)) => t.0 += 1,
                (true, Some(Mark::Same)) => t.1 += 1,
                (true, Some(Mark::Worse)) => t.2 += 1,
                _ => {}
            }
        }
        t
    }

    /// Table-shaped CSV: one row per case, `mean,std,mark` per algorithm, and
    /// a closing row of `+/≈/−` counts.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["case".to_string()];
        for a in &self.algos {
            header.extend([format!("{a}_mean"), format!("{a}_std"), format!("{a}_mark")]);
        }
        w.write_record(&header).expect("in-memory write");
        for case in &self.cases {
            let mut row = vec![case.id()];
            for a in &self.algos {
                match self.cells.get(&(*case, a.clone())) {
                    Some(c) => row.extend([
                        format!("{:e}", c.mean),
                        format!("{:e}", c.std),
                        c.mark.map_or(String::new(), |m| m.symbol().to_string()),
                    ]),
                    None => row.extend([String::new(), String::new(), String::new()]),
                }
            }
            w.write_record(&row).expect("in-memory write");
        }
        let mut row = vec!["+/≈/−".to_string()];
        for a in &self.algos {
            let t = self.tally(a);
            let counts = if a == REFERENCE { String::new() } else { format!("{}/{}/{}", t.0, t.1, t.2) };
            row.extend([String::new(), String::new(), counts]);
        }
        w.write_record(&row).expect("in-memory write");
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        }
        std::fs::write(path, self.to_csv()).map_err(io_err(path))
    }
}

/// Groups reports by (case, algorithm). Cells whose column or reference has
/// fewer than two values get no mark.
pub fn summarize(reports: &[RunReport]) -> Result<Summary> {
    let mut groups: BTreeMap<(CaseSpec, String), Vec<(u64, f64)>> = BTreeMap::new();
    for r in reports {
        groups.entry((r.case, r.algo.clone())).or_default().push((r.seed, r.reported_eff));
    }
    // seed order makes the floating-point sums independent of report order
    let values: BTreeMap<(CaseSpec, String), Vec<f64>> = groups
        .into_iter()
        .map(|(k, mut v)| {
            v.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
            (k, v.into_iter().map(|(_, f)| f).collect())
        })
        .collect();

    let mut cases: Vec<CaseSpec> = values.keys().map(|(c, _)| *c).collect();
    cases.sort_by_key(|c| (c.dim, c.problem));
    cases.dedup();
    let mut algos: Vec<String> = values.keys().map(|(_, a)| a.clone()).collect();
    algos.sort();
    algos.dedup();
    if let Some(i) = algos.iter().position(|a| a == REFERENCE) {
        let r = algos.remove(i);
        algos.insert(0, r);
    }

    let mut cells = BTreeMap::new();
    for ((case, algo), v) in &values {
        let reference = values.get(&(*case, REFERENCE.to_string()));
        let mark = match reference {
            Some(rv) if algo != REFERENCE && v.len() >= 2 && rv.len() >= 2 => {
                Some(match wilcoxon_rank_sum(v, rv, ALPHA)?.verdict {
                    Verdict::Better => Mark::Better,
                    Verdict::NoDifference => Mark::Same,
                    Verdict::Worse => Mark::Worse,
                })
            }
            _ => None,
        };
        cells.insert((*case, algo.clone()), Cell { n: v.len(), mean: mean(v), std: sample_std(v), mark });
    }
    Ok(Summary { cases, algos, cells })
}
