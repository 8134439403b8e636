//! Search-history archive: every `(x, f(x))` pair produced while searching
//! the unperturbed problem, trimmed to capacity with the best entry kept.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::types::{argmax_first, DecisionVector, Fitness, Individual};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveEntry {
    pub x: DecisionVector,
    pub f: Fitness,
}

/// A multiset of archive entries in insertion order. Duplicates are kept.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Archive {
    entries: Vec<ArchiveEntry>,
}

impl Archive {
    pub fn new() -> Self {
        Archive::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        Archive { entries: Vec::with_capacity(n) }
    }

    pub fn from_entries(entries: Vec<ArchiveEntry>) -> Self {
        Archive { entries }
    }

    pub fn entries(&self) -> &[ArchiveEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Index of the first entry with the largest `f`.
    pub fn best_index(&self) -> Option<usize> {
        argmax_first(&self.entries, |e| e.f.value())
    }

    pub fn best(&self) -> Option<&ArchiveEntry> {
        self.best_index().map(|i| &self.entries[i])
    }

    /// Appends one entry per individual, in population order.
    pub fn record_generation(&mut self, pop: &[Individual]) -> Result<()> {
        if let Some(i) = pop.iter().position(|ind| ind.raw_fitness.is_none()) {
            return Err(Error::contract(format!("individual {i} has no raw fitness to archive")));
        }
        self.entries.extend(pop.iter().map(|ind| ArchiveEntry {
            x: ind.x.clone(),
            f: ind.raw_fitness.expect("checked above"),
        }));
        Ok(())
    }

    /// Keeps the best entry plus `n_a - 1` others drawn uniformly without
    /// replacement. Archives already within capacity are returned as is.
    /// The best entry comes first, the rest keep their relative order.
    pub fn trim(&self, n_a: usize, rng: &mut RngStream) -> Result<Archive> {
        if n_a == 0 {
            return Err(Error::contract("archive capacity must be at least 1"));
        }
        if self.entries.len() <= n_a {
            return Ok(self.clone());
        }
        let best = self.best_index().expect("non-empty");
        let mut picked = index::sample(rng, self.entries.len() - 1, n_a - 1).into_vec();
        picked.sort_unstable();
        let mut out = Vec::with_capacity(n_a);
        out.push(self.entries[best].clone());
        // Indices into the archive with `best` removed.
        out.extend(picked.into_iter().map(|i| self.entries[if i < best { i } else { i + 1 }].clone()));
        Ok(Archive { entries: out })
    }

    /// Writes one line per entry: the coordinates then `f`, whitespace
    /// separated, in shortest round-trip decimal form.
    pub fn dump<W: Write>(&self, mut w: W) -> Result<()> {
        let mut line = String::new();
        for e in &self.entries {
            line.clear();
            for v in e.x.iter() {
                write!(line, "{v:e} ").expect("string write");
            }
            writeln!(line, "{:e}", e.f.value()).expect("string write");
            w.write_all(line.as_bytes())?;
        }
        Ok(())
    }

    /// Parses the format written by [`Archive::dump`]. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn load<R: BufRead>(r: R) -> Result<Archive> {
        let mut entries = Vec::new();
        let mut dim = None;
        for (n, line) in r.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let vals = t
                .split_whitespace()
                .map(|s| s.parse::<f64>().map_err(|e| Error::Parse(format!("line {}: {e}", n + 1))))
                .collect::<Result<Vec<_>>>()?;
            if vals.len() < 2 {
                return Err(Error::Parse(format!("line {}: need coordinates and a fitness", n + 1)));
            }
            let d = vals.len() - 1;
            if *dim.get_or_insert(d) != d {
                return Err(Error::Parse(format!("line {}: dimension changed to {d}", n + 1)));
            }
            let (coords, f) = vals.split_at(d);
            entries.push(ArchiveEntry { x: DecisionVector::new(coords.to_vec())?, f: Fitness::new(f[0])? });
        }
        Ok(Archive { entries })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(x: f64, f: f64) -> ArchiveEntry {
        ArchiveEntry { x: DecisionVector::new(vec![x, -x]).unwrap(), f: Fitness::new(f).unwrap() }
    }

    fn archive(fs: &[f64]) -> Archive {
        Archive::from_entries(fs.iter().enumerate().map(|(i, &f)| entry(i as f64, f)).collect())
    }

    fn ind(x: f64, f: f64) -> Individual {
        Individual::with_raw(DecisionVector::new(vec![x, x]).unwrap(), Fitness::new(f).unwrap())
    }

    #[test]
    fn record_keeps_duplicates_and_order() {
        let mut a = Archive::new();
        let pop: Vec<_> = (0..100).map(|i| ind(i as f64, -(i as f64))).collect();
        a.record_generation(&pop).unwrap();
        assert_eq!(a.len(), 100);
        a.record_generation(&[ind(1.0, 2.0), ind(1.0, 2.0)]).unwrap();
        assert_eq!(a.len(), 102);
        assert_eq!(a.entries()[100], a.entries()[101]);
        assert_eq!(a.entries()[3].f.value(), -3.0);
    }

    #[test]
    fn record_rejects_unevaluated() {
        let mut a = Archive::new();
        let bad = Individual::new(DecisionVector::zeros(2));
        assert!(a.record_generation(&[ind(0.0, 1.0), bad]).is_err());
        assert!(a.is_empty());
    }

    #[test]
    fn hundred_generations_fill_ten_thousand() {
        let mut a = Archive::new();
        let pop: Vec<_> = (0..100).map(|i| ind(i as f64, 0.0)).collect();
        for _ in 0..100 {
            a.record_generation(&pop).unwrap();
        }
        assert_eq!(a.len(), 10_000);
    }

    #[test]
    fn trim_keeps_best() {
        let a = archive(&[3.0, 9.0, 1.0, 7.0, 5.0]);
        for seed in 0..50 {
            let t = a.trim(3, &mut RngStream::new(seed, 0)).unwrap();
            assert_eq!(t.len(), 3);
            assert_eq!(t.entries()[0].f.value(), 9.0);
            assert_eq!(t.entries().iter().filter(|e| e.f.value() == 9.0).count(), 1);
        }
    }

    #[test]
    fn trim_at_capacity_is_identity() {
        let a = archive(&[1.0, 2.0, 3.0]);
        assert_eq!(a.trim(3, &mut RngStream::new(0, 0)).unwrap(), a);
        assert_eq!(a.trim(10, &mut RngStream::new(0, 0)).unwrap(), a);
        assert!(a.trim(0, &mut RngStream::new(0, 0)).is_err());
    }

    #[test]
    fn trim_ties_keep_first_best() {
        let a = archive(&[1.0, 5.0, 5.0, 2.0]);
        let t = a.trim(1, &mut RngStream::new(0, 0)).unwrap();
        assert_eq!(t.entries()[0], a.entries()[1]);
    }

    #[test]
    fn trim_samples_uniformly() {
        // 99 non-best entries, 9 slots: each should appear with probability 9/99.
        let fs: Vec<f64> = (0..100).map(|i| if i == 42 { 1000.0 } else { i as f64 }).collect();
        let a = archive(&fs);
        let trials = 1000;
        let mut counts = vec![0usize; 100];
        for seed in 0..trials {
            let t = a.trim(10, &mut RngStream::new(seed, 7)).unwrap();
            for e in t.entries() {
                counts[e.x[0] as usize] += 1;
            }
        }
        assert_eq!(counts[42], trials as usize);
        let p = 9.0 / 99.0;
        let mut chi2 = 0.0;
        for (i, &c) in counts.iter().enumerate() {
            if i == 42 {
                continue;
            }
            let freq = c as f64 / trials as f64;
            assert!((freq - p).abs() < 0.03, "entry {i}: {freq}");
            let expected = p * trials as f64;
            chi2 += (c as f64 - expected).powi(2) / expected;
        }
        // 98 degrees of freedom; the 0.999 quantile is about 148.
        assert!(chi2 < 148.0, "chi2 = {chi2}");
    }

    #[test]
    fn dump_load_round_trip() {
        let a = Archive::from_entries(vec![
            ArchiveEntry { x: DecisionVector::new(vec![0.1, 1.0 / 3.0]).unwrap(), f: Fitness::new(-1e-300).unwrap() },
            ArchiveEntry { x: DecisionVector::new(vec![6.0, 4.0]).unwrap(), f: Fitness::new(1.2).unwrap() },
        ]);
        let mut buf = Vec::new();
        a.dump(&mut buf).unwrap();
        let b = Archive::load(std::io::Cursor::new(buf)).unwrap();
        assert_eq!(a, b);
        assert!(Archive::load(std::io::Cursor::new("1 2 3\n1 2\n")).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn trim_invariants(fs in prop::collection::vec(-5i32..5, 1..60), n_a in 1usize..40, seed in any::<u64>()) {
                let a = archive(&fs.iter().map(|&v| v as f64).collect::<Vec<_>>());
                let t = a.trim(n_a, &mut RngStream::new(seed, 0)).unwrap();
                prop_assert_eq!(t.len(), a.len().min(n_a));
                let best = a.best().unwrap();
                prop_assert!(t.entries().contains(best));
                // entries carry distinct x, so containment with multiplicity is a subset check
                let mut seen = std::collections::HashSet::new();
                for e in t.entries() {
                    prop_assert!(a.entries().contains(e));
                    prop_assert!(seen.insert(e.x[0].to_bits()));
                }
            }
        }
    }
}
