//! Brute-force rank-sum reference: U by pair counting and the two-sided p by
//! enumerating every way to split the pooled values into groups of the
//! original sizes.

/// Twice the Mann-Whitney U of `a` (a win counts 2, a tie 1).
pub fn doubled_u(a: &[f64], b: &[f64]) -> i64 {
    let mut u = 0;
    for x in a {
        for y in b {
            u += if x > y {
                2
            } else if x == y {
                1
            } else {
                0
            };
        }
    }
    u
}

fn subsets(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for i in start..n {
        if n - i < k - cur.len() {
            break;
        }
        cur.push(i);
        subsets(n, k, i + 1, cur, out);
        cur.pop();
    }
}

/// `(U, p)` by full enumeration.
pub fn oracle_rank_sum(a: &[f64], b: &[f64]) -> (f64, f64) {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (n1, n2) = (a.len(), b.len());
    let centre = (n1 * n2) as i64;
    let obs = doubled_u(a, b);
    let mut all = Vec::new();
    subsets(n1 + n2, n1, 0, &mut Vec::new(), &mut all);
    let mut extreme = 0usize;
    for pick in &all {
        let xs: Vec<f64> = pick.iter().map(|&i| pooled[i]).collect();
        let ys: Vec<f64> = (0..pooled.len()).filter(|i| !pick.contains(i)).map(|i| pooled[i]).collect();
        if (doubled_u(&xs, &ys) - centre).abs() >= (obs - centre).abs() {
            extreme += 1;
        }
    }
    (obs as f64 / 2.0, extreme as f64 / all.len() as f64)
}
