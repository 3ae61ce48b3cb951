use serde::Serialize;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

const EXACT_LIMIT: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MWTestResult {
    /// Pairs where the bad value exceeds the good one, ties counting half.
    pub u_statistic: f64,
    pub p_value: f64,
    pub n_bad: usize,
    pub n_good: usize,
    pub exact: bool,
}

/// Two-sided Mann-Whitney U test.
pub fn mann_whitney(bad: &[f64], good: &[f64]) -> Result<MWTestResult> {
    if bad.is_empty() || good.is_empty() {
        return Err(Error::invalid("Mann-Whitney needs two non-empty groups"));
    }
    if bad.iter().chain(good).any(|v| v.is_nan()) {
        return Err(Error::invalid("Mann-Whitney input contains NaN"));
    }
    let (m, n) = (bad.len(), good.len());
    let mut u = 0.0;
    for &b in bad {
        for &g in good {
            if b > g {
                u += 1.0;
            } else if b == g {
                u += 0.5;
            }
        }
    }

    let mut all: Vec<f64> = bad.iter().chain(good).copied().collect();
    all.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i + 1;
        while j < all.len() && all[j] == all[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }

    let exact = m * n <= EXACT_LIMIT && tie_term == 0.0;
    let p = if exact {
        let dist = exact_distribution(m, n);
        let k = u as usize;
        let lower: f64 = dist[..=k].iter().sum();
        let upper: f64 = dist[k..].iter().sum();
        (2.0 * lower.min(upper)).min(1.0)
    } else {
        let (mf, nf) = (m as f64, n as f64);
        let total = mf + nf;
        let mean = mf * nf / 2.0;
        let var = mf * nf / 12.0 * ((total + 1.0) - tie_term / (total * (total - 1.0)));
        if var <= 0.0 {
            1.0
        } else {
            let z = ((u - mean).abs() - 0.5).max(0.0) / var.sqrt();
            erfc(z / std::f64::consts::SQRT_2).min(1.0)
        }
    };
    Ok(MWTestResult {
        u_statistic: u,
        p_value: p,
        n_bad: m,
        n_good: n,
        exact,
    })
}

/// Null distribution of U for group sizes `m` and `n`, as probabilities
/// indexed by U. Uses P(m, n, u) = m/(m+n)·P(m-1, n, u-n) + n/(m+n)·P(m, n-1, u),
/// conditioning on which group holds the largest value.
pub(crate) fn exact_distribution(m: usize, n: usize) -> Vec<f64> {
    let (m, n) = if m <= n { (m, n) } else { (n, m) };
    // prev[j] holds the distribution for (i-1, j); cur[j] for (i, j).
    let mut prev: Vec<Vec<f64>> = (0..=n).map(|_| vec![1.0]).collect();
    for i in 1..=m {
        let mut cur: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        cur.push(vec![1.0]);
        for j in 1..=n {
            let total = (i + j) as f64;
            let wi = i as f64 / total;
            let wj = j as f64 / total;
            let mut d = vec![0.0; i * j + 1];
            // Largest value in the first group: it beats all j of the second.
            for (u, p) in prev[j].iter().enumerate() {
                d[u + j] += wi * p;
            }
            for (u, p) in cur[j - 1].iter().enumerate() {
                d[u] += wj * p;
            }
            cur.push(d);
        }
        prev = cur;
    }
    prev.swap_remove(n)
}
