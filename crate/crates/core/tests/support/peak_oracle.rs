//! Direct quadratic-time transcription of the peak classification, kept
//! deliberately naive: repeated max-selection, full scans, no prefilters.

use drea_core::{Archive, ArchiveEntry};

fn dist(p: &[f64], q: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..p.len() {
        s += (p[i] - q[i]) * (p[i] - q[i]);
    }
    s.sqrt()
}

fn angle_ok(a: &[f64], b: &[f64], c: &[f64], theta: f64) -> bool {
    let ab = dist(a, b);
    let ac = dist(a, c);
    if ac == 0.0 {
        return true;
    }
    let mut dot = 0.0;
    for i in 0..a.len() {
        dot += (b[i] - a[i]) * (c[i] - a[i]);
    }
    let cos = (dot / (ab * ac)).clamp(-1.0, 1.0);
    cos.acos() <= theta
}

/// Peaks (archive entries) in set order.
pub fn oracle_peaks(archive: &Archive, theta: f64, n_p: usize) -> Vec<ArchiveEntry> {
    let all = archive.entries();
    let mut remaining: Vec<usize> = (0..all.len()).collect();
    let mut sets: Vec<Vec<usize>> = Vec::new();

    while !remaining.is_empty() {
        // best remaining entry, earliest index on ties
        let mut pos = 0;
        for k in 1..remaining.len() {
            if all[remaining[k]].f.value() > all[remaining[pos]].f.value() {
                pos = k;
            }
        }
        let j = remaining.remove(pos);
        if sets.is_empty() {
            sets.push(vec![j]);
            continue;
        }
        let a = all[j].x.as_slice();
        let fa = all[j].f.value();

        let mut choice: Option<usize> = None;
        let mut choice_d = 0.0;
        for (k, set) in sets.iter().enumerate() {
            let mut r = f64::INFINITY;
            for &m in set {
                let d = dist(a, all[m].x.as_slice());
                if d < r {
                    r = d;
                }
            }
            let b = all[set[0]].x.as_slice();
            let mut ok = true;
            if dist(a, b) != 0.0 {
                for c in all {
                    if c.f.value() < fa && dist(a, c.x.as_slice()) <= r && angle_ok(a, b, c.x.as_slice(), theta) {
                        ok = false;
                        break;
                    }
                }
            }
            if ok && (choice.is_none() || r < choice_d) {
                choice = Some(k);
                choice_d = r;
            }
        }
        match choice {
            Some(k) => sets[k].push(j),
            None => {
                if sets.len() == n_p {
                    break;
                }
                sets.push(vec![j]);
            }
        }
    }
    sets.iter().map(|s| all[s[0]].clone()).collect()
}
