//! L2-regularized logistic regression fitted by damped Newton steps. The
//! parameter count is at most five, so the Hessian solve is negligible.

pub(crate) struct LogisticFit {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

struct Objective<'a> {
    rows: &'a [Vec<f64>],
    targets: &'a [f64],
    l2: f64,
}

impl Objective<'_> {
    fn margin(&self, w: &[f64], b: f64, row: &[f64]) -> f64 {
        row.iter().zip(w).map(|(x, w)| x * w).sum::<f64>() + b
    }

    fn loss(&self, w: &[f64], b: f64) -> f64 {
        let n = self.rows.len() as f64;
        let data: f64 = self
            .rows
            .iter()
            .zip(self.targets)
            .map(|(row, &t)| {
                let m = self.margin(w, b, row);
                // -[t ln σ(m) + (1-t) ln(1-σ(m))]
                t * softplus(-m) + (1.0 - t) * softplus(m)
            })
            .sum();
        data / n + 0.5 * self.l2 * w.iter().map(|w| w * w).sum::<f64>()
    }

    fn gradient(&self, w: &[f64], b: f64) -> (Vec<f64>, f64) {
        let n = self.rows.len() as f64;
        let mut gw = vec![0.0; w.len()];
        let mut gb = 0.0;
        for (row, &t) in self.rows.iter().zip(self.targets) {
            let r = sigmoid(self.margin(w, b, row)) - t;
            for (g, x) in gw.iter_mut().zip(row) {
                *g += r * x;
            }
            gb += r;
        }
        for (g, w) in gw.iter_mut().zip(w) {
            *g = *g / n + self.l2 * w;
        }
        (gw, gb / n)
    }
}

/// Solves `a x = b` for symmetric positive definite `a`; `None` otherwise.
#[allow(clippy::needless_range_loop)]
fn cholesky_solve(mut a: Vec<Vec<f64>>, b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    for j in 0..n {
        let mut d = a[j][j];
        for k in 0..j {
            d -= a[j][k] * a[j][k];
        }
        if d.is_nan() || d <= 0.0 {
            return None;
        }
        let d = d.sqrt();
        a[j][j] = d;
        for i in j + 1..n {
            let mut v = a[i][j];
            for k in 0..j {
                v -= a[i][k] * a[j][k];
            }
            a[i][j] = v / d;
        }
    }
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= a[i][k] * y[k];
        }
        y[i] /= a[i][i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] -= a[k][i] * y[k];
        }
        y[i] /= a[i][i];
    }
    Some(y)
}

impl Objective<'_> {
    /// Hessian over (w, b), bias last.
    #[allow(clippy::needless_range_loop)]
    fn hessian(&self, w: &[f64], b: f64) -> Vec<Vec<f64>> {
        let d = w.len();
        let n = self.rows.len() as f64;
        let mut h = vec![vec![0.0; d + 1]; d + 1];
        for row in self.rows {
            let s = sigmoid(self.margin(w, b, row));
            let c = s * (1.0 - s) / n;
            for i in 0..=d {
                let xi = if i < d { row[i] } else { 1.0 };
                for j in 0..=i {
                    let xj = if j < d { row[j] } else { 1.0 };
                    h[i][j] += c * xi * xj;
                }
            }
        }
        for i in 0..=d {
            for j in 0..i {
                h[j][i] = h[i][j];
            }
            h[i][i] += if i < d { self.l2 } else { 1e-12 };
        }
        h
    }
}

pub(crate) fn fit(
    rows: &[Vec<f64>],
    labels: &[bool],
    l2: f64,
    grad_tol: f64,
    max_iter: usize,
) -> LogisticFit {
    let dim = rows.first().map_or(0, Vec::len);
    let targets: Vec<f64> = labels.iter().map(|&y| f64::from(u8::from(y))).collect();
    let obj = Objective {
        rows,
        targets: &targets,
        l2,
    };
    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut loss = obj.loss(&w, b);
    let mut iterations = 0;
    loop {
        let (gw, gb) = obj.gradient(&w, b);
        let mut g = gw;
        g.push(gb);
        let g2: f64 = g.iter().map(|v| v * v).sum();
        if g2.sqrt() < grad_tol || iterations >= max_iter {
            break;
        }
        iterations += 1;
        let dir = cholesky_solve(obj.hessian(&w, b), &g).unwrap_or_else(|| g.clone());
        let slope: f64 = dir.iter().zip(&g).map(|(d, g)| d * g).sum();
        let mut step: f64 = 1.0;
        let mut moved = false;
        while step >= 1e-12 {
            let nw: Vec<f64> = w.iter().zip(&dir).map(|(w, d)| w - step * d).collect();
            let nb = b - step * dir[dim];
            let nl = obj.loss(&nw, nb);
            if nl <= loss - 1e-4 * step * slope {
                w = nw;
                b = nb;
                loss = nl;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }
    LogisticFit {
        weights: w,
        bias: b,
        iterations,
    }
}
