use nalgebra::DMatrix;

use super::fock::TwoModeState;
use crate::error::{Error, Result};

/// Eigenvalues below this are dropped from the entropy sum.
pub const DROP_TOL: f64 = 1e-14;
/// Eigenvalues below `-NEGATIVE_TOL` signal an invalid density matrix.
pub const NEGATIVE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Grid,
    Fock,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedDensityMatrix {
    pub entries: DMatrix<f64>,
    pub basis: Basis,
}

impl ReducedDensityMatrix {
    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }
}

/// Traces out mode `traced_mode` (0 or 1) of a pure two-mode state.
pub fn reduced_density_matrix(s: &TwoModeState, traced_mode: usize) -> Result<ReducedDensityMatrix> {
    if traced_mode > 1 {
        return Err(Error::Contract(format!("mode index {traced_mode} out of range")));
    }
    let (phi, basis) = match s {
        TwoModeState::Grid { grid1, grid2, values } => {
            // Discrete kernel with quadrature weights folded in.
            let w = (grid1.spacing * grid2.spacing).sqrt();
            (values * w, Basis::Grid)
        }
        TwoModeState::Fock { amps } => (amps.clone(), Basis::Fock),
    };
    let mut rho = if traced_mode == 1 {
        &phi * phi.transpose()
    } else {
        phi.transpose() * &phi
    };
    let sym = (&rho + rho.transpose()) * 0.5;
    rho = sym;
    Ok(ReducedDensityMatrix { entries: rho, basis })
}

/// Splits index sets that the matrix never couples (e.g. parity sectors),
/// so large block-diagonal matrices are diagonalized block by block.
fn blocks(m: &DMatrix<f64>) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let parity_split = (0..n).all(|i| (0..n).all(|j| (i + j) % 2 == 0 || m[(i, j)] == 0.0));
    if parity_split && n > 1 {
        vec![(0..n).step_by(2).collect(), (1..n).step_by(2).collect()]
    } else {
        vec![(0..n).collect()]
    }
}

/// Rows whose diagonal falls below this fraction of the trace are dropped
/// before diagonalizing. Positivity bounds their couplings by the square root,
/// so the neglected weight is far below the entropy cutoff, and dropping them
/// keeps subnormal entries out of the Householder reductions.
const NEGLIGIBLE_DIAGONAL: f64 = 1e-24;

/// Eigenvalues of a symmetric matrix, exploiting a parity block structure.
/// Eigenvalues of dropped negligible rows are reported as zero.
pub fn symmetric_spectrum(m: &DMatrix<f64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.nrows());
    let cutoff = NEGLIGIBLE_DIAGONAL * m.trace().abs();
    for idx in blocks(m) {
        let (idx, dropped): (Vec<usize>, Vec<usize>) = idx.into_iter().partition(|&i| m[(i, i)].abs() > cutoff);
        out.extend(dropped.iter().map(|_| 0.0));
        if idx.is_empty() {
            continue;
        }
        let sub = m.select_rows(&idx).select_columns(&idx);
        out.extend(sub.symmetric_eigenvalues().iter());
    }
    out
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rdm: &ReducedDensityMatrix) -> Result<f64> {
    let spectrum = symmetric_spectrum(&rdm.entries);
    entropy_of_spectrum(&spectrum)
}

pub fn entropy_of_spectrum(spectrum: &[f64]) -> Result<f64> {
    if spectrum.iter().any(|p| p.is_nan()) {
        return Err(Error::EigenNonConvergence {
            iterations: 0,
            residual: f64::NAN,
        });
    }
    if let Some(&min) = spectrum.iter().min_by(|a, b| a.total_cmp(b)) {
        if min < -NEGATIVE_TOL {
            return Err(Error::InvalidDensityMatrix(min));
        }
    }
    let s: f64 = spectrum.iter().filter(|&&p| p > DROP_TOL).map(|&p| -p * p.log2()).sum();
    Ok(s.max(0.0))
}
