//! Lowest eigenpair of a real symmetric tridiagonal matrix.
//!
//! Sturm-sequence bisection pins the smallest eigenvalue to machine
//! precision; inverse iteration with a shift just below it then recovers the
//! eigenvector from a positive-definite (pivot-free) factorization.

use crate::error::{Error, Result};

/// Number of eigenvalues strictly below `x`.
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let denom = if q == 0.0 {
            f64::EPSILON * off[i - 1].abs().max(1e-300)
        } else {
            q
        };
        q = diag[i] - x - off[i - 1] * off[i - 1] / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Solves `(T - sigma) x = b` by forward elimination; `T - sigma` must be
/// positive definite.
fn shifted_solve(diag: &[f64], off: &[f64], sigma: f64, b: &[f64], x: &mut [f64]) {
    let n = diag.len();
    let mut piv = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    piv[0] = diag[0] - sigma;
    rhs[0] = b[0];
    for i in 1..n {
        let m = off[i - 1] / piv[i - 1];
        piv[i] = diag[i] - sigma - m * off[i - 1];
        rhs[i] = b[i] - m * rhs[i - 1];
    }
    x[n - 1] = rhs[n - 1] / piv[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = (rhs[i] - off[i] * x[i + 1]) / piv[i];
    }
}

/// Returns `(lambda_min, eigenvector)` with the eigenvector normalized to unit
/// Euclidean norm and a nonnegative sum.
pub fn lowest_eigenpair(diag: &[f64], off: &[f64]) -> Result<(f64, Vec<f64>)> {
    let n = diag.len();
    if n == 0 || off.len() + 1 != n {
        return Err(Error::Contract("malformed tridiagonal matrix".into()));
    }
    // Gershgorin bounds.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let scale = lo.abs().max(hi.abs()).max(1.0);
    while hi - lo > 4.0 * f64::EPSILON * scale {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let lambda = hi;
    // Shift strictly below the spectrum keeps every pivot positive.
    let sigma = lo - 64.0 * f64::EPSILON * scale;
    let mut x = vec![1.0; n];
    let mut y = vec![0.0; n];
    for _ in 0..6 {
        shifted_solve(diag, off, sigma, &x, &mut y);
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::EigenNonConvergence {
                iterations: 0,
                residual: f64::NAN,
            });
        }
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / norm;
        }
    }
    let mut residual = 0.0;
    for i in 0..n {
        let mut t = (diag[i] - lambda) * x[i];
        if i > 0 {
            t += off[i - 1] * x[i - 1];
        }
        if i + 1 < n {
            t += off[i] * x[i + 1];
        }
        residual += t * t;
    }
    let residual = residual.sqrt();
    if residual > 1e-8 * scale {
        return Err(Error::EigenNonConvergence {
            iterations: 6,
            residual,
        });
    }
    if x.iter().sum::<f64>() < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    Ok((lambda, x))
}
