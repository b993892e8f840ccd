//! Restarted Lanczos iteration for the lowest eigenpair of a large symmetric
//! operator, with full reorthogonalization inside each cycle.
//!
//! The Krylov space never leaves the symmetry sector of the start vector, so
//! a start vector sharing the ground state's symmetry avoids the tunnelling
//! partners that make the full-space gap exponentially small.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// A real symmetric linear operator applied matrix-free.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    /// `y <- A x`
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions {
    pub krylov_dim: usize,
    pub max_restarts: usize,
    /// Converged when `||A v - lambda v|| <= tolerance * max(1, |lambda|)`.
    pub tolerance: f64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            krylov_dim: 60,
            max_restarts: 400,
            tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LanczosResult {
    pub eigenvalue: f64,
    pub eigenvector: Vec<f64>,
    /// Second Ritz value of the final cycle (within the start vector's sector).
    pub next_eigenvalue: f64,
    pub residual: f64,
    pub matvecs: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn lowest_eigenpair<O: LinearOperator + ?Sized>(
    op: &O,
    start: &[f64],
    opts: &LanczosOptions,
) -> Result<LanczosResult> {
    let n = op.dim();
    if start.len() != n {
        return Err(Error::Contract("start vector has wrong length".into()));
    }
    let mut x = start.to_vec();
    let nrm = dot(&x, &x).sqrt();
    if nrm == 0.0 || !nrm.is_finite() {
        return Err(Error::Contract("start vector must be nonzero".into()));
    }
    x.iter_mut().for_each(|v| *v /= nrm);

    let m = opts.krylov_dim.clamp(2, n.max(2));
    let mut matvecs = 0;
    let mut last_residual = f64::INFINITY;
    let mut w = vec![0.0; n];
    for _cycle in 0..=opts.max_restarts {
        let mut basis: Vec<Vec<f64>> = vec![x.clone()];
        let mut alpha = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);
        for j in 0..m {
            op.apply(&basis[j], &mut w);
            matvecs += 1;
            let a = dot(&w, &basis[j]);
            alpha.push(a);
            // Two passes of classical Gram-Schmidt against the whole basis.
            for _ in 0..2 {
                for v in &basis {
                    let c = dot(&w, v);
                    axpy(-c, v, &mut w);
                }
            }
            let b = dot(&w, &w).sqrt();
            beta.push(b);
            if j + 1 == m || b <= 1e-14 * a.abs().max(1.0) || basis.len() == n {
                break;
            }
            basis.push(w.iter().map(|v| v / b).collect());
        }
        let k = alpha.len();
        let mut t = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let i0 = order[0];
        let theta = eig.eigenvalues[i0];
        let next = order.get(1).map_or(f64::INFINITY, |&i| eig.eigenvalues[i]);
        let s = eig.eigenvectors.column(i0);
        let mut ritz = vec![0.0; n];
        for (coef, v) in s.iter().zip(&basis) {
            axpy(*coef, v, &mut ritz);
        }
        let rn = dot(&ritz, &ritz).sqrt();
        ritz.iter_mut().for_each(|v| *v /= rn);
        last_residual = beta[k - 1] * s[k - 1].abs();
        if last_residual <= opts.tolerance * theta.abs().max(1.0) || k < m {
            // Confirm with an explicit residual.
            op.apply(&ritz, &mut w);
            matvecs += 1;
            axpy(-theta, &ritz, &mut w);
            let r = dot(&w, &w).sqrt();
            if r <= 10.0 * opts.tolerance * theta.abs().max(1.0) {
                return Ok(LanczosResult {
                    eigenvalue: theta,
                    eigenvector: ritz,
                    next_eigenvalue: next,
                    residual: r,
                    matvecs,
                });
            }
            last_residual = r;
        }
        x = ritz;
    }
    Err(Error::EigenNonConvergence {
        iterations: matvecs,
        residual: last_residual,
    })
}

/// Dense symmetric matrix as an operator, mostly for tests.
impl LinearOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_lowest_of_dense_matrix() {
        let n = 150;
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = (i as f64).sqrt() + 0.1 * ((i * 13 % 7) as f64);
            for j in 0..i {
                let v = 0.05 / (1.0 + (i - j) as f64);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        let exact = m
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let start = vec![1.0; n];
        let opts = LanczosOptions {
            krylov_dim: 20,
            ..Default::default()
        };
        let r = lowest_eigenpair(&m, &start, &opts).unwrap();
        assert!((r.eigenvalue - exact).abs() < 1e-9, "{} vs {}", r.eigenvalue, exact);
        assert!(r.next_eigenvalue > r.eigenvalue);
    }

    #[test]
    fn small_operator_exhausts_space() {
        let m = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0]);
        let r = lowest_eigenpair(&m, &[1.0, 0.5, 1.0], &LanczosOptions::default()).unwrap();
        assert!((r.eigenvalue - (2.0 - 2f64.sqrt())).abs() < 1e-12);
    }
}
