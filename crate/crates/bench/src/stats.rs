//! Descriptive statistics and the two-sided Wilcoxon rank-sum test.

use std::fmt;

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{BenchError, Result};

/// Sample sizes at or below this (on the smaller side) use the exact null
/// distribution; larger ones use the normal approximation.
pub const EXACT_LIMIT: usize = 8;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n - 1 denominator); 0 for a single value.
pub fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Outcome for the first sample relative to the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Better,
    Worse,
    NoDifference,
}

impl Verdict {
    pub fn mirrored(self) -> Verdict {
        match self {
            Verdict::Better => Verdict::Worse,
            Verdict::Worse => Verdict::Better,
            Verdict::NoDifference => Verdict::NoDifference,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Better => "better",
            Verdict::Worse => "worse",
            Verdict::NoDifference => "no-difference",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankSum {
    /// Mann-Whitney U of the first sample (pairs where it wins, ties half).
    pub u: f64,
    pub p_value: f64,
    pub verdict: Verdict,
    pub exact: bool,
}

/// Midranks (1-based) of the pooled values, doubled so they are integers.
fn doubled_midranks(pooled: &[f64]) -> Vec<u64> {
    let mut idx: Vec<usize> = (0..pooled.len()).collect();
    idx.sort_by(|&i, &j| pooled[i].total_cmp(&pooled[j]));
    let mut ranks = vec![0u64; pooled.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && pooled[idx[end]] == pooled[idx[start]] {
            end += 1;
        }
        // ranks start+1 ..= end, midrank doubled = start + 1 + end
        for &i in &idx[start..end] {
            ranks[i] = (start + 1 + end) as u64;
        }
        start = end;
    }
    ranks
}

/// Two-sided Mann-Whitney / Wilcoxon rank-sum test of `a` against `b`.
///
/// The verdict is `NoDifference` unless `p < alpha`; otherwise the side with
/// the larger median is better (the larger U when the medians tie).
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64], alpha: f64) -> Result<RankSum> {
    let (n1, n2) = (a.len(), b.len());
    let exact = n1.min(n2) <= EXACT_LIMIT;
    let (u, p_value) = if exact { exact_test(a, b)? } else { normal_test(a, b)? };
    let verdict = if p_value < alpha {
        let (ma, mb) = (median(a), median(b));
        let a_ahead = if ma != mb { ma > mb } else { u > (n1 * n2) as f64 / 2.0 };
        if a_ahead {
            Verdict::Better
        } else {
            Verdict::Worse
        }
    } else {
        Verdict::NoDifference
    };
    Ok(RankSum { u, p_value, verdict, exact })
}

struct Pooled {
    ranks: Vec<u64>,
    n1: usize,
    n2: usize,
    w2: u64,
    u: f64,
    constant: bool,
}

fn pool(a: &[f64], b: &[f64]) -> Result<Pooled> {
    if a.is_empty() || b.is_empty() {
        return Err(BenchError::Stats("rank-sum test needs non-empty samples".into()));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(BenchError::Stats("rank-sum test needs finite values".into()));
    }
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = doubled_midranks(&pooled);
    let n1 = a.len();
    let w2: u64 = ranks[..n1].iter().sum();
    // U = W - n1 (n1 + 1) / 2, computed on doubled ranks
    let u = (w2 as f64 - (n1 * (n1 + 1)) as f64) / 2.0;
    let constant = pooled.iter().all(|&v| v == pooled[0]);
    Ok(Pooled { ranks, n1, n2: b.len(), w2, u, constant })
}

/// `(U, p)` from the exact permutation distribution of the rank sum.
pub fn exact_test(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    let p = pool(a, b)?;
    let pv = if p.constant { 1.0 } else { exact_p(&p.ranks, p.n1, p.w2) };
    Ok((p.u, pv))
}

/// `(U, p)` from the normal approximation.
pub fn normal_test(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    let p = pool(a, b)?;
    let pv = if p.constant { 1.0 } else { normal_p(&p.ranks, p.n1, p.n2, p.u) };
    Ok((p.u, pv))
}

/// Exact two-sided p: the share of all `C(n, n1)` rank subsets whose sum is
/// at least as far from its mean as the observed one.
fn exact_p(ranks: &[u64], n1: usize, w2_obs: u64) -> f64 {
    let n = ranks.len();
    let max_sum: u64 = {
        let mut r = ranks.to_vec();
        r.sort_unstable_by(|x, y| y.cmp(x));
        r[..n1].iter().sum()
    };
    let width = max_sum as usize + 1;
    // ways[k][s]: subsets of size k with doubled-rank sum s
    let mut ways = vec![vec![0f64; width]; n1 + 1];
    ways[0][0] = 1.0;
    for &r in ranks {
        let r = r as usize;
        for k in (1..=n1).rev() {
            let (lo, hi) = ways.split_at_mut(k);
            let prev = &lo[k - 1];
            let cur = &mut hi[0];
            for s in (r..width).rev() {
                if prev[s - r] != 0.0 {
                    cur[s] += prev[s - r];
                }
            }
        }
    }
    // doubled mean of the rank sum: n1 (n + 1)
    let centre = (n1 * (n + 1)) as i64;
    let obs = (w2_obs as i64 - centre).abs();
    let total: f64 = ways[n1].iter().sum();
    let extreme: f64 = ways[n1]
        .iter()
        .enumerate()
        .filter(|&(s, _)| (s as i64 - centre).abs() >= obs)
        .map(|(_, &c)| c)
        .sum();
    (extreme / total).min(1.0)
}

/// Normal approximation with tie-corrected variance and continuity correction.
fn normal_p(ranks: &[u64], n1: usize, n2: usize, u: f64) -> f64 {
    let n = (n1 + n2) as f64;
    let mut sorted = ranks.to_vec();
    sorted.sort_unstable();
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let (f1, f2) = (n1 as f64, n2 as f64);
    let var = f1 * f2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((u - f1 * f2 / 2.0).abs() - 0.5).max(0.0) / var.sqrt();
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    (2.0 * (1.0 - std_normal.cdf(z))).min(1.0)
}
