//! Small numerical kernels shared by the sub-solvers.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Solve a tridiagonal system with the Thomas algorithm.
///
/// `lower[0]` and `upper[n-1]` are ignored.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    debug_assert!(lower.len() == n && upper.len() == n && rhs.len() == n);
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = diag[0];
    if pivot == 0.0 || !pivot.is_finite() {
        return Err(Error::Singular("zero pivot in row 0".into()));
    }
    c[0] = upper[0] / pivot;
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - lower[i] * c[i - 1];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(Error::Singular(format!("zero pivot in row {i}")));
        }
        c[i] = if i + 1 < n { upper[i] / pivot } else { 0.0 };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

/// Bernoulli function `x / (e^x - 1)`, with `B(0) = 1`.
pub fn bernoulli(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - 0.5 * x
    } else {
        x / x.exp_m1()
    }
}

/// Running trapezoid integral of `f` over the abscissae `x`, starting at 0.
pub fn cumulative_trapezoid(x: &[f64], f: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..x.len() {
        acc += 0.5 * (x[i] - x[i - 1]) * (f[i] + f[i - 1]);
        out.push(acc);
    }
    out
}

/// Trapezoid integral of `f` over `x`.
pub fn trapezoid(x: &[f64], f: &[f64]) -> f64 {
    x.windows(2)
        .zip(f.windows(2))
        .map(|(xw, fw)| 0.5 * (xw[1] - xw[0]) * (fw[0] + fw[1]))
        .sum()
}

/// Three-point finite-difference weights for the first derivative at node `j`
/// of a (possibly non-uniform) grid. Central in the interior, one-sided
/// second order at both ends. Returns `(indices, weights)`.
pub fn derivative_stencil(x: &[f64], j: usize) -> ([usize; 3], [f64; 3]) {
    let n = x.len();
    assert!(n >= 3, "derivative stencil needs at least 3 nodes");
    if j == 0 {
        let h1 = x[1] - x[0];
        let h2 = x[2] - x[1];
        let w0 = -(2.0 * h1 + h2) / (h1 * (h1 + h2));
        let w1 = (h1 + h2) / (h1 * h2);
        let w2 = -h1 / (h2 * (h1 + h2));
        ([0, 1, 2], [w0, w1, w2])
    } else if j == n - 1 {
        let h1 = x[n - 2] - x[n - 3];
        let h2 = x[n - 1] - x[n - 2];
        let w0 = h2 / (h1 * (h1 + h2));
        let w1 = -(h1 + h2) / (h1 * h2);
        let w2 = (2.0 * h2 + h1) / (h2 * (h1 + h2));
        ([n - 3, n - 2, n - 1], [w0, w1, w2])
    } else {
        let h1 = x[j] - x[j - 1];
        let h2 = x[j + 1] - x[j];
        let w0 = -h2 / (h1 * (h1 + h2));
        let w1 = (h2 - h1) / (h1 * h2);
        let w2 = h1 / (h2 * (h1 + h2));
        ([j - 1, j, j + 1], [w0, w1, w2])
    }
}

/// First derivative of sampled data on a (possibly non-uniform) grid.
pub fn gradient(x: &[f64], f: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|j| {
            let (idx, w) = derivative_stencil(x, j);
            w[0] * f[idx[0]] + w[1] * f[idx[1]] + w[2] * f[idx[2]]
        })
        .collect()
}

/// Largest absolute entry.
pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Evenly spaced points on `[start, stop]`, both ends included.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let h = (stop - start) / (count - 1) as f64;
            let mut v: Vec<f64> = (0..count).map(|i| start + h * i as f64).collect();
            v[count - 1] = stop;
            v
        }
    }
}

/// Solve a small dense system by Gaussian elimination with partial pivoting.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
            .unwrap_or(k);
        if a[p][k] == 0.0 || !a[p][k].is_finite() {
            return Err(Error::Singular(format!("zero pivot in column {k}")));
        }
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let m = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= m * a[k][j];
            }
            b[i] -= m * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    Ok(x)
}

/// Anderson mixing for a fixed-point map `x = g(x)`.
///
/// Each call to [`Anderson::step`] takes the current iterate and its residual
/// `g(x) - x` and returns the next iterate.
#[derive(Debug, Clone)]
pub struct Anderson {
    depth: usize,
    beta: f64,
    xs: VecDeque<Vec<f64>>,
    fs: VecDeque<Vec<f64>>,
}

impl Anderson {
    pub fn new(depth: usize, beta: f64) -> Self {
        Self {
            depth,
            beta,
            xs: VecDeque::new(),
            fs: VecDeque::new(),
        }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn set_beta(&mut self, beta: f64) {
        self.beta = beta;
    }

    pub fn reset(&mut self) {
        self.xs.clear();
        self.fs.clear();
    }

    pub fn step(&mut self, x: &[f64], f: &[f64]) -> Vec<f64> {
        let beta = self.beta;
        let plain: Vec<f64> = x.iter().zip(f).map(|(x, f)| x + beta * f).collect();
        if self.depth == 0 {
            return plain;
        }
        self.xs.push_back(x.to_vec());
        self.fs.push_back(f.to_vec());
        if self.xs.len() > self.depth + 1 {
            self.xs.pop_front();
            self.fs.pop_front();
        }
        let m = self.xs.len() - 1;
        if m == 0 {
            return plain;
        }
        let diff = |v: &VecDeque<Vec<f64>>, i: usize| -> Vec<f64> { v[i + 1].iter().zip(&v[i]).map(|(a, b)| a - b).collect() };
        let dx: Vec<Vec<f64>> = (0..m).map(|i| diff(&self.xs, i)).collect();
        let df: Vec<Vec<f64>> = (0..m).map(|i| diff(&self.fs, i)).collect();
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(a, b)| a * b).sum::<f64>();
        let mut gram = vec![vec![0.0; m]; m];
        for i in 0..m {
            for j in 0..=i {
                gram[i][j] = dot(&df[i], &df[j]);
                gram[j][i] = gram[i][j];
            }
        }
        let trace: f64 = (0..m).map(|i| gram[i][i]).sum();
        for (i, row) in gram.iter_mut().enumerate() {
            row[i] += 1e-12 * trace.max(f64::MIN_POSITIVE);
        }
        let rhs: Vec<f64> = df.iter().map(|d| dot(d, f)).collect();
        let Ok(coef) = solve_dense(gram, rhs) else {
            self.reset();
            return plain;
        };
        let mut next = plain;
        for (i, c) in coef.iter().enumerate() {
            for (k, v) in next.iter_mut().enumerate() {
                *v -= c * (dx[i][k] + beta * df[i][k]);
            }
        }
        next
    }
}
