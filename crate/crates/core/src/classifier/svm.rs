//! C-SVC with an RBF kernel, solved by SMO with second-order working-set
//! selection.

use std::cell::RefCell;

pub fn rbf(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * d2).exp()
}

const TAU: f64 = 1e-12;
const MAX_CACHED_ENTRIES: usize = 1 << 25;

/// Kernel rows computed on demand and cached until the cache is full.
struct KernelRows<'a> {
    rows: &'a [Vec<f64>],
    gamma: f64,
    cache: RefCell<Vec<Option<Box<[f64]>>>>,
    cached: RefCell<usize>,
}

impl<'a> KernelRows<'a> {
    fn new(rows: &'a [Vec<f64>], gamma: f64) -> Self {
        KernelRows {
            rows,
            gamma,
            cache: RefCell::new(vec![None; rows.len()]),
            cached: RefCell::new(0),
        }
    }

    fn with_row<T>(&self, i: usize, f: impl FnOnce(&[f64]) -> T) -> T {
        if let Some(row) = &self.cache.borrow()[i] {
            return f(row);
        }
        let row: Box<[f64]> = self
            .rows
            .iter()
            .map(|r| rbf(&self.rows[i], r, self.gamma))
            .collect();
        let out = f(&row);
        let n = self.rows.len();
        let mut cached = self.cached.borrow_mut();
        let mut cache = self.cache.borrow_mut();
        if (*cached + 1) * n > MAX_CACHED_ENTRIES {
            cache.iter_mut().for_each(|r| *r = None);
            *cached = 0;
        }
        cache[i] = Some(row);
        *cached += 1;
        out
    }
}

#[derive(Debug, Clone)]
pub struct SmoSolution {
    pub alpha: Vec<f64>,
    /// Decision function is `Σ αᵢ yᵢ K(xᵢ, x) - rho`.
    pub rho: f64,
    pub iterations: usize,
}

pub fn solve(
    rows: &[Vec<f64>],
    labels: &[bool],
    c: f64,
    gamma: f64,
    eps: f64,
    max_iter: usize,
) -> SmoSolution {
    let n = rows.len();
    let y: Vec<f64> = labels.iter().map(|&l| if l { 1.0 } else { -1.0 }).collect();
    let kernel = KernelRows::new(rows, gamma);
    let qd = vec![1.0; n]; // K(x, x) = 1 for RBF
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let upper = |a: f64| a >= c;
    let lower = |a: f64| a <= 0.0;

    let mut iterations = 0;
    while iterations < max_iter {
        // i: maximal violator in I_up
        let mut gmax = f64::NEG_INFINITY;
        let mut gmax_idx = None;
        for t in 0..n {
            if y[t] > 0.0 {
                if !upper(alpha[t]) && -grad[t] >= gmax {
                    gmax = -grad[t];
                    gmax_idx = Some(t);
                }
            } else if !lower(alpha[t]) && grad[t] >= gmax {
                gmax = grad[t];
                gmax_idx = Some(t);
            }
        }
        let Some(i) = gmax_idx else { break };

        let (j, gmax2) = kernel.with_row(i, |ki| {
            let mut gmax2 = f64::NEG_INFINITY;
            let mut best = None;
            let mut obj_min = f64::INFINITY;
            for t in 0..n {
                let (grad_diff, eligible) = if y[t] > 0.0 {
                    if lower(alpha[t]) {
                        continue;
                    }
                    gmax2 = gmax2.max(grad[t]);
                    (gmax + grad[t], true)
                } else {
                    if upper(alpha[t]) {
                        continue;
                    }
                    gmax2 = gmax2.max(-grad[t]);
                    (gmax - grad[t], true)
                };
                if eligible && grad_diff > 0.0 {
                    let quad = qd[i] + qd[t] - 2.0 * ki[t];
                    let obj = -(grad_diff * grad_diff) / if quad > 0.0 { quad } else { TAU };
                    if obj <= obj_min {
                        obj_min = obj;
                        best = Some(t);
                    }
                }
            }
            (best, gmax2)
        });
        let Some(j) = j else { break };
        if gmax + gmax2 < eps {
            break;
        }
        iterations += 1;

        let kij = kernel.with_row(i, |ki| ki[j]);
        let (old_i, old_j) = (alpha[i], alpha[j]);
        if y[i] != y[j] {
            let quad = (qd[i] + qd[j] + 2.0 * (-kij)).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = (qd[i] + qd[j] - 2.0 * kij).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        kernel.with_row(i, |ki| {
            for t in 0..n {
                grad[t] += y[t] * y[i] * ki[t] * di;
            }
        });
        kernel.with_row(j, |kj| {
            for t in 0..n {
                grad[t] += y[t] * y[j] * kj[t] * dj;
            }
        });
    }

    // rho from free vectors, or the midpoint of the feasible interval.
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free, mut sum_free) = (0usize, 0.0);
    for t in 0..n {
        let yg = y[t] * grad[t];
        if upper(alpha[t]) {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if lower(alpha[t]) {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            sum_free += yg;
        }
    }
    let rho = if free > 0 {
        sum_free / free as f64
    } else {
        (ub + lb) / 2.0
    };
    SmoSolution {
        alpha,
        rho,
        iterations,
    }
}

/// Largest KKT violation over the training set, measured on yᵢ·f(xᵢ):
/// α=0 needs y·f ≥ 1, 0<α<C needs y·f = 1, α=C needs y·f ≤ 1.
pub fn kkt_violation(
    solution: &SmoSolution,
    rows: &[Vec<f64>],
    labels: &[bool],
    c: f64,
    gamma: f64,
) -> f64 {
    let y: Vec<f64> = labels.iter().map(|&l| if l { 1.0 } else { -1.0 }).collect();
    let mut worst: f64 = 0.0;
    for (i, xi) in rows.iter().enumerate() {
        let f: f64 = rows
            .iter()
            .zip(&solution.alpha)
            .zip(&y)
            .filter(|((_, a), _)| **a > 0.0)
            .map(|((xj, a), yj)| a * yj * rbf(xi, xj, gamma))
            .sum::<f64>()
            - solution.rho;
        let margin = y[i] * f - 1.0;
        let a = solution.alpha[i];
        let violation = if a <= 0.0 {
            (-margin).max(0.0)
        } else if a >= c {
            margin.max(0.0)
        } else {
            margin.abs()
        };
        worst = worst.max(violation);
    }
    worst
}
