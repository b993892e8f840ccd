//! The cusp Hamiltonian written in the bare-mode Fock basis at maximal
//! mixing, `theta = pi/2`:
//!
//! ```text
//! H = (A+3)/4 (n1 + n2 + 1) + (A-1)/8 (a1^2 + a1^dag^2 + a2^2 + a2^dag^2)
//!   + (A-1)/4 (a1 + a1^dag)(a2 + a2^dag) + (a1 + a1^dag + a2 + a2^dag)^4 / (64 mu)
//! ```
//!
//! Used as an independent check of the grid pipeline.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use super::density::{reduced_density_matrix, von_neumann_entropy};
use super::fock::{TwoModeState, TAIL_TOL};
use super::lanczos::{lowest_eigenpair, LanczosOptions, LinearOperator};
use crate::error::{Error, Result};

/// Compressed sparse row storage of a real square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub dim: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl CsrMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let row = &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]];
        match row.binary_search(&j) {
            Ok(k) => self.vals[self.row_ptr[i] + k],
            Err(_) => 0.0,
        }
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Exact (bitwise) symmetry check.
    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| (self.row_ptr[i]..self.row_ptr[i + 1]).all(|k| self.get(self.cols[k], i) == self.vals[k]))
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                m[(i, self.cols[k])] = self.vals[k];
            }
        }
        m
    }
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = (self.row_ptr[i]..self.row_ptr[i + 1])
                .map(|k| self.vals[k] * x[self.cols[k]])
                .sum();
        }
    }
}

/// Single-mode operators on `|0>..|n_max>`. Powers of the quadrature are
/// formed in a larger space and then truncated, so every kept matrix
/// element is exact.
struct ModeOps {
    number: DMatrix<f64>,
    squeeze: DMatrix<f64>,
    /// `q^k` for `k = 0..=4`, `q = a + a^dag`.
    q_pow: Vec<DMatrix<f64>>,
}

impl ModeOps {
    fn new(n_max: usize) -> Self {
        let ext = n_max + 5;
        let mut a = DMatrix::<f64>::zeros(ext, ext);
        for n in 1..ext {
            a[(n - 1, n)] = (n as f64).sqrt();
        }
        let ad = a.transpose();
        let q = &a + &ad;
        let d = n_max + 1;
        let mut q_pow = vec![DMatrix::identity(ext, ext)];
        for k in 1..=4 {
            let next = &q_pow[k - 1] * &q;
            q_pow.push(next);
        }
        let cut = |m: &DMatrix<f64>| m.view((0, 0), (d, d)).into_owned();
        Self {
            number: cut(&(&ad * &a)),
            squeeze: cut(&(&a * &a + &ad * &ad)),
            q_pow: q_pow.iter().map(cut).collect(),
        }
    }
}

type SparseRows = Vec<Vec<(usize, f64)>>;

/// Row-sparse view of a small dense matrix.
fn sparse_rows(m: &DMatrix<f64>) -> SparseRows {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .filter(|&j| m[(i, j)] != 0.0)
                .map(|j| (j, m[(i, j)]))
                .collect()
        })
        .collect()
}

/// Builds `H` on the two-mode space truncated at `n_max` quanta per mode.
/// Basis index of `|n1, n2>` is `n1 * (n_max + 1) + n2`.
pub fn build_cusp_fock_hamiltonian(a: f64, mu: f64, n_max: usize) -> Result<CsrMatrix> {
    if n_max < 10 {
        return Err(Error::Contract(format!("n_max must be at least 10, got {n_max}")));
    }
    if !(mu > 0.0) || !mu.is_finite() || !a.is_finite() {
        return Err(Error::InvalidParameter {
            key: "mu".into(),
            reason: "needs finite A and positive finite mu".into(),
        });
    }
    let ops = ModeOps::new(n_max);
    let d = n_max + 1;
    let id = DMatrix::<f64>::identity(d, d);
    let mut n_plus_half = ops.number.clone();
    n_plus_half += &id * 0.5;
    // (coefficient, mode-1 operator, mode-2 operator)
    let mut terms: Vec<(f64, DMatrix<f64>, DMatrix<f64>)> = vec![
        ((a + 3.0) / 4.0, n_plus_half.clone(), id.clone()),
        ((a + 3.0) / 4.0, id.clone(), n_plus_half),
        ((a - 1.0) / 8.0, ops.squeeze.clone(), id.clone()),
        ((a - 1.0) / 8.0, id.clone(), ops.squeeze.clone()),
        ((a - 1.0) / 4.0, ops.q_pow[1].clone(), ops.q_pow[1].clone()),
    ];
    const BINOM4: [f64; 5] = [1.0, 4.0, 6.0, 4.0, 1.0];
    for (k, b) in BINOM4.iter().enumerate() {
        terms.push((b / (64.0 * mu), ops.q_pow[k].clone(), ops.q_pow[4 - k].clone()));
    }
    let terms: Vec<(f64, SparseRows, SparseRows)> = terms
        .iter()
        .filter(|t| t.0 != 0.0)
        .map(|(c, m1, m2)| (*c, sparse_rows(m1), sparse_rows(m2)))
        .collect();

    let dim = d * d;
    let mut row_ptr = Vec::with_capacity(dim + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    row_ptr.push(0);
    let mut row: BTreeMap<usize, f64> = BTreeMap::new();
    for i1 in 0..d {
        for i2 in 0..d {
            row.clear();
            for (c, r1, r2) in &terms {
                for &(j1, v1) in &r1[i1] {
                    for &(j2, v2) in &r2[i2] {
                        *row.entry(j1 * d + j2).or_insert(0.0) += c * v1 * v2;
                    }
                }
            }
            for (&j, &v) in &row {
                if v != 0.0 {
                    cols.push(j);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
    }
    let mut h = CsrMatrix {
        dim,
        row_ptr,
        cols,
        vals,
    };
    // Summation order differs between (i, j) and (j, i); average the pair so
    // the stored matrix is exactly symmetric.
    let snapshot = h.clone();
    for i in 0..dim {
        for k in h.row_ptr[i]..h.row_ptr[i + 1] {
            let j = h.cols[k];
            h.vals[k] = 0.5 * (snapshot.vals[k] + snapshot.get(j, i));
        }
    }
    Ok(h)
}

/// Ground state of the truncated Hamiltonian, started from the vacuum so the
/// iteration stays in the sector of even total excitation number.
pub fn cusp_fock_ground_state(a: f64, mu: f64, n_max: usize) -> Result<(f64, TwoModeState)> {
    let h = build_cusp_fock_hamiltonian(a, mu, n_max)?;
    let mut start = vec![0.0; h.dim];
    start[0] = 1.0;
    let opts = LanczosOptions {
        krylov_dim: 100,
        max_restarts: 2000,
        tolerance: 1e-10,
    };
    let res = lowest_eigenpair(&h, &start, &opts)?;
    let d = n_max + 1;
    let amps = DMatrix::from_row_slice(d, d, &res.eigenvector);
    let tail: f64 = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .filter(|&(i, j)| i + 5 > n_max || j + 5 > n_max)
        .map(|(i, j)| amps[(i, j)] * amps[(i, j)])
        .sum();
    if tail > TAIL_TOL {
        return Err(Error::Truncation { n_max, tail });
    }
    Ok((res.eigenvalue, TwoModeState::Fock { amps }))
}

/// Ground-state entropy in bits, growing `n_max` until the truncation tail
/// is below tolerance.
pub fn cusp_fock_entropy(a: f64, mu: f64) -> Result<f64> {
    let mut n_max = 30;
    loop {
        match cusp_fock_ground_state(a, mu, n_max) {
            Ok((_, state)) => {
                return von_neumann_entropy(&reduced_density_matrix(&state, 1)?);
            }
            Err(Error::Truncation { .. }) if n_max < 200 => n_max += n_max / 2,
            Err(e) => return Err(e),
        }
    }
}
