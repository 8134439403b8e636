//! Peak detection on a search-history archive.
//!
//! Entries are visited from best to worst. A point joins the peak set it can
//! "see" without a valley in between: looking from the point toward the set's
//! peak, no strictly lower archive point may lie inside the sector of
//! half-angle `theta` whose radius is the point's distance to the set. If no
//! set qualifies, the point starts a new set, until `n_p` sets exist.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::archive::{Archive, ArchiveEntry};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::types::{squared_distance, DecisionVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakDetectionConfig {
    pub theta: f64,
    pub n_p: usize,
}

impl Default for PeakDetectionConfig {
    fn default() -> Self {
        PeakDetectionConfig { theta: PI / 12.0, n_p: 3 }
    }
}

impl PeakDetectionConfig {
    pub fn new(theta: f64, n_p: usize) -> Result<Self> {
        let cfg = PeakDetectionConfig { theta, n_p };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta < PI / 2.0) {
            return Err(Error::config(format!("theta must lie in (0, pi/2), got {}", self.theta)));
        }
        if self.n_p == 0 {
            return Err(Error::config("n_p must be at least 1"));
        }
        Ok(())
    }
}

/// A cluster of archive entries attributed to one summit. `peak` is the
/// first member, which is also the member with the largest `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakSet {
    pub members: Vec<ArchiveEntry>,
}

impl PeakSet {
    pub fn peak(&self) -> &ArchiveEntry {
        &self.members[0]
    }
}

/// Smallest Euclidean distance from `p` to a member of `ps`.
pub fn dist_to_peakset(p: &DecisionVector, ps: &PeakSet) -> Result<f64> {
    if ps.members.is_empty() {
        return Err(Error::contract("distance to an empty peak set"));
    }
    let mut best = f64::INFINITY;
    for m in &ps.members {
        if m.x.dim() != p.dim() {
            return Err(Error::DimensionMismatch { expected: p.dim(), actual: m.x.dim() });
        }
        best = best.min(squared_distance(p, &m.x));
    }
    Ok(best.sqrt())
}

/// Whether `c` lies in the sector at `a` pointing toward `peak_b` with
/// half-angle `theta` and radius `r`. A `c` equal to `a` is always inside.
/// The caller handles `peak_b == a`; this function then answers false for
/// every `c != a`.
pub fn in_sector_neighborhood(
    a: &DecisionVector,
    peak_b: &DecisionVector,
    c: &DecisionVector,
    theta: f64,
    r: f64,
) -> Result<bool> {
    if peak_b.dim() != a.dim() || c.dim() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), actual: peak_b.dim().max(c.dim()) });
    }
    if r.is_nan() || r < 0.0 {
        return Err(Error::contract("sector radius must be non-negative"));
    }
    let ab = squared_distance(a, peak_b).sqrt();
    Ok(sector_test(a, peak_b, ab, c, squared_distance(a, c), theta, r))
}

fn sector_test(a: &[f64], b: &[f64], ab_len: f64, c: &[f64], ac_sq: f64, theta: f64, r: f64) -> bool {
    let ac_len = ac_sq.sqrt();
    if ac_len > r {
        return false;
    }
    if ac_len == 0.0 {
        return true;
    }
    if ab_len == 0.0 {
        return false;
    }
    let mut dot = 0.0;
    for ((&ai, &bi), &ci) in a.iter().zip(b).zip(c) {
        dot += (bi - ai) * (ci - ai);
    }
    let cos = (dot / (ab_len * ac_len)).clamp(-1.0, 1.0);
    cos.acos() <= theta
}

/// Classifies the archive into at most `n_p` peak sets.
pub fn detect_peak_sets(archive: &Archive, cfg: &PeakDetectionConfig, exec: Executor) -> Result<Vec<PeakSet>> {
    cfg.validate()?;
    let entries = archive.entries();
    if entries.is_empty() {
        return Err(Error::contract("peak detection on an empty archive"));
    }
    let dim = entries[0].x.dim();
    if let Some(e) = entries.iter().find(|e| e.x.dim() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, actual: e.x.dim() });
    }

    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.sort_by(|&i, &j| entries[j].f.value().total_cmp(&entries[i].f.value()));
    let f: Vec<f64> = order.iter().map(|&i| entries[i].f.value()).collect();
    let pts: Vec<&[f64]> = order.iter().map(|&i| entries[i].x.as_slice()).collect();

    // first_lower[j]: first sorted position with f strictly below f[j]
    let mut first_lower = vec![f.len(); f.len()];
    for j in (0..f.len().saturating_sub(1)).rev() {
        first_lower[j] = if f[j + 1] < f[j] { j + 1 } else { first_lower[j + 1] };
    }

    // Sets as sorted positions; position 0 is the global best.
    let mut sets: Vec<Vec<usize>> = vec![vec![0]];
    let mut min_sq: Vec<f64> = Vec::with_capacity(cfg.n_p);

    for j in 1..pts.len() {
        let a = pts[j];
        min_sq.clear();
        min_sq.extend(sets.iter().map(|s| s.iter().map(|&m| squared_distance(a, pts[m])).fold(f64::INFINITY, f64::min)));

        let mut chosen: Option<(usize, f64)> = None;
        for (k, set) in sets.iter().enumerate() {
            let b = pts[set[0]];
            let r = min_sq[k].sqrt();
            let ab_len = squared_distance(a, b).sqrt();
            let admissible = ab_len == 0.0 || !valley_between(a, b, ab_len, r, &pts, first_lower[j], cfg.theta, exec);
            if admissible && chosen.is_none_or(|(_, d)| r < d) {
                chosen = Some((k, r));
            }
        }
        match chosen {
            Some((k, _)) => sets[k].push(j),
            None if sets.len() < cfg.n_p => sets.push(vec![j]),
            None => break,
        }
    }

    Ok(sets
        .into_iter()
        .map(|s| PeakSet { members: s.into_iter().map(|p| entries[order[p]].clone()).collect() })
        .collect())
}

/// Whether some strictly lower point (sorted positions `from..`) sits in the
/// sector from `a` toward `b`.
#[allow(clippy::too_many_arguments)]
fn valley_between(a: &[f64], b: &[f64], ab_len: f64, r: f64, pts: &[&[f64]], from: usize, theta: f64, exec: Executor) -> bool {
    // Cheap reject on squared distance; the margin keeps it conservative so
    // the exact comparison happens in `sector_test`.
    let r_sq_loose = r * r * (1.0 + 1e-12) + f64::MIN_POSITIVE;
    let check = |q: usize| {
        let c = pts[q];
        let ac_sq = squared_distance(a, c);
        ac_sq <= r_sq_loose && sector_test(a, b, ab_len, c, ac_sq, theta, r)
    };
    let n = pts.len() - from;
    if n < 2048 {
        (from..pts.len()).any(check)
    } else {
        exec.any(from..pts.len(), check)
    }
}

/// The peak of each detected set, best set first.
pub fn detect_peaks(archive: &Archive, cfg: &PeakDetectionConfig, exec: Executor) -> Result<Vec<DecisionVector>> {
    Ok(detect_peak_sets(archive, cfg, exec)?.into_iter().map(|s| s.peak().x.clone()).collect())
}

/// One line per peak: coordinates then `f`, whitespace separated.
pub fn dump_peaks<W: Write>(sets: &[PeakSet], mut w: W) -> Result<()> {
    let mut line = String::new();
    for s in sets {
        line.clear();
        for v in s.peak().x.iter() {
            write!(line, "{v:e} ").expect("string write");
        }
        writeln!(line, "{:e}", s.peak().f.value()).expect("string write");
        w.write_all(line.as_bytes())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use crate::types::Fitness;

    fn dv(v: &[f64]) -> DecisionVector {
        DecisionVector::new(v.to_vec()).unwrap()
    }

    fn entry(x: &[f64], f: f64) -> ArchiveEntry {
        ArchiveEntry { x: dv(x), f: Fitness::new(f).unwrap() }
    }

    fn set(xs: &[&[f64]]) -> PeakSet {
        PeakSet { members: xs.iter().map(|x| entry(x, 0.0)).collect() }
    }

    #[test]
    fn distance_examples() {
        assert_eq!(dist_to_peakset(&dv(&[0.0, 3.0]), &set(&[&[0.0, 0.0], &[3.0, 4.0]])).unwrap(), 3.0);
        assert_eq!(dist_to_peakset(&dv(&[4.0, 5.0]), &set(&[&[1.0, 1.0]])).unwrap(), 5.0);
        assert_eq!(dist_to_peakset(&dv(&[3.0, 4.0]), &set(&[&[0.0, 0.0], &[3.0, 4.0]])).unwrap(), 0.0);
        assert!(dist_to_peakset(&dv(&[0.0, 0.0]), &PeakSet { members: vec![] }).is_err());
        assert!(dist_to_peakset(&dv(&[0.0]), &set(&[&[0.0, 0.0]])).is_err());
    }

    #[test]
    fn sector_examples() {
        let t = PI / 12.0;
        let (a, b) = (dv(&[0.0, 0.0]), dv(&[1.0, 0.0]));
        assert!(in_sector_neighborhood(&a, &b, &dv(&[0.5, 0.1]), t, 0.6).unwrap());
        assert!(!in_sector_neighborhood(&a, &b, &dv(&[0.5, 0.1]), t, 0.5).unwrap());
        assert!(!in_sector_neighborhood(&a, &b, &dv(&[0.0, 1.0]), t, 1.0).unwrap());
        assert!(!in_sector_neighborhood(&a, &b, &dv(&[0.0, 1.0]), t, 10.0).unwrap());
        assert!(in_sector_neighborhood(&a, &b, &a, t, 0.0).unwrap());
        assert!(in_sector_neighborhood(&a, &a, &a, t, 3.0).unwrap());
        assert!(in_sector_neighborhood(&a, &b, &dv(&[0.0, 0.0, 0.0]), t, 1.0).is_err());
        assert!(in_sector_neighborhood(&a, &b, &a, t, -1.0).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(PeakDetectionConfig::default().validate().is_ok());
        assert!(PeakDetectionConfig::new(0.0, 3).is_err());
        assert!(PeakDetectionConfig::new(PI / 2.0, 3).is_err());
        assert!(PeakDetectionConfig::new(0.1, 0).is_err());
    }

    fn sampled(n: usize, seed: u64, f: impl Fn(&[f64]) -> f64) -> Archive {
        let mut rng = RngStream::new(seed, 0);
        Archive::from_entries(
            (0..n)
                .map(|_| {
                    let x = [10.0 * rng.unit(), 10.0 * rng.unit()];
                    entry(&x, f(&x))
                })
                .collect(),
        )
    }

    #[test]
    fn single_concave_bump_gives_one_peak() {
        let a = sampled(300, 3, |x| -((x[0] - 4.0).powi(2) + (x[1] - 6.0).powi(2)));
        let peaks = detect_peaks(&a, &PeakDetectionConfig::default(), Executor::Sequential).unwrap();
        assert_eq!(peaks, vec![a.best().unwrap().x.clone()]);
    }

    #[test]
    fn two_bumps_give_two_peaks() {
        let g = |x: &[f64], c: f64| (-((x[0] - c).powi(2) + (x[1] - c).powi(2)) / 2.0).exp();
        let a = sampled(200, 11, |x| g(x, 2.0) + g(x, 8.0));
        let peaks = detect_peaks(&a, &PeakDetectionConfig::default(), Executor::Sequential).unwrap();
        assert_eq!(peaks.len(), 2);
        let near = |p: &DecisionVector, c: f64| p.iter().all(|v| (v - c).abs() < 1.5);
        assert!(peaks.iter().any(|p| near(p, 2.0)));
        assert!(peaks.iter().any(|p| near(p, 8.0)));
    }

    #[test]
    fn single_peak_budget_returns_best() {
        let a = sampled(100, 5, |x| (x[0] * 3.0).sin() * (x[1] * 2.0).cos());
        let cfg = PeakDetectionConfig::new(PI / 12.0, 1).unwrap();
        assert_eq!(detect_peaks(&a, &cfg, Executor::Sequential).unwrap(), vec![a.best().unwrap().x.clone()]);
    }

    #[test]
    fn ties_are_not_lower() {
        // A plateau of equal values has no valleys.
        let a = Archive::from_entries(vec![
            entry(&[0.0, 0.0], 1.0),
            entry(&[1.0, 0.0], 1.0),
            entry(&[2.0, 0.0], 1.0),
            entry(&[3.0, 0.0], 1.0),
        ]);
        let sets = detect_peak_sets(&a, &PeakDetectionConfig::default(), Executor::Sequential).unwrap();
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0].members.len(), 4);
    }

    #[test]
    fn coincident_point_joins_peak() {
        let a = Archive::from_entries(vec![entry(&[1.0, 1.0], 2.0), entry(&[1.0, 1.0], 1.0), entry(&[5.0, 5.0], 0.5)]);
        let sets = detect_peak_sets(&a, &PeakDetectionConfig::default(), Executor::Sequential).unwrap();
        assert_eq!(sets[0].members.len(), 3);
    }

    #[test]
    fn valley_opens_second_set() {
        // 0 -- dip -- 2 on a line: the right summit sees the dip toward the left one.
        let a = Archive::from_entries(vec![entry(&[0.0], 3.0), entry(&[1.0], 0.0), entry(&[2.0], 2.0)]);
        let sets = detect_peak_sets(&a, &PeakDetectionConfig::default(), Executor::Sequential).unwrap();
        assert_eq!(sets.len(), 2);
        assert_eq!(sets[1].peak().x.as_slice(), &[2.0]);
        // the dip itself joins the nearer set; both are at distance 1, so the first wins
        assert_eq!(sets[0].members.len(), 2);
    }

    #[test]
    fn errors() {
        let cfg = PeakDetectionConfig::default();
        assert!(detect_peaks(&Archive::new(), &cfg, Executor::Sequential).is_err());
        let mixed = Archive::from_entries(vec![entry(&[0.0], 1.0), entry(&[0.0, 1.0], 0.0)]);
        assert!(detect_peaks(&mixed, &cfg, Executor::Sequential).is_err());
    }

    #[test]
    fn executors_agree() {
        let g = |x: &[f64], cx: f64, cy: f64| (-((x[0] - cx).powi(2) + (x[1] - cy).powi(2))).exp();
        let a = sampled(5000, 21, |x| g(x, 2.0, 3.0) + 0.8 * g(x, 7.0, 7.0) + 0.6 * g(x, 2.0, 8.0));
        let cfg = PeakDetectionConfig::default();
        let runs: Vec<_> = Executor::available().into_iter().map(|e| detect_peak_sets(&a, &cfg, e).unwrap()).collect();
        assert!(runs.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn dump_lines() {
        let a = Archive::from_entries(vec![entry(&[0.0], 3.0), entry(&[1.0], 0.0), entry(&[2.0], 2.0)]);
        let sets = detect_peak_sets(&a, &PeakDetectionConfig::default(), Executor::Sequential).unwrap();
        let mut out = Vec::new();
        dump_peaks(&sets, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "0e0 3e0\n2e0 2e0\n");
    }
}
