//! Fock-basis representation of the collective mode and the SU(2) rotation
//! onto the bare modes.
//!
//! Quadratures follow `y = (b^dag + b) / sqrt(2)`, so the number states are
//! the unit-frequency Hermite functions.

use nalgebra::DMatrix;

use super::grid::Grid1D;
use crate::error::{Error, Result};

/// Truncation tail allowed in the top five Fock levels and in the missing norm.
pub const TAIL_TOL: f64 = 1e-8;

/// Evaluates the normalized Hermite functions `psi_0..=psi_n_max` at `y`.
///
/// The recurrence runs on rescaled values so that large `|y|` neither
/// underflows the Gaussian prefactor nor loses the growing tail.
pub fn hermite_functions(y: f64, n_max: usize, out: &mut Vec<f64>) {
    out.clear();
    out.reserve(n_max + 1);
    const BIG: f64 = 1e150;
    let mut log_scale = -0.5 * y * y - 0.25 * std::f64::consts::PI.ln();
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut raw = Vec::with_capacity(n_max + 1);
    let mut scales = Vec::with_capacity(n_max + 1);
    raw.push(cur);
    scales.push(log_scale);
    for n in 0..n_max {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * y * cur - (nf / (nf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > BIG {
            prev /= BIG;
            cur /= BIG;
            log_scale += BIG.ln();
        }
        raw.push(cur);
        scales.push(log_scale);
    }
    out.extend(raw.iter().zip(&scales).map(|(r, s)| r * s.exp()));
}

/// Projects a grid wavefunction onto the number states `|0>..|n_max>`.
///
/// Mirror points are paired so that an exactly even (odd) wavefunction on a
/// symmetric grid yields exactly vanishing odd (even) coefficients.
pub fn fock_coefficients(psi: &[f64], grid: &Grid1D, n_max: usize) -> Result<Vec<f64>> {
    if psi.len() != grid.n_points {
        return Err(Error::Contract("wavefunction does not match grid".into()));
    }
    let h = grid.spacing;
    let mut c = vec![0.0; n_max + 1];
    let mut hf = Vec::new();
    if grid.is_symmetric() {
        let n = grid.n_points;
        for j in n / 2..n {
            let mirror = n - 1 - j;
            let (even, odd) = (psi[j] + psi[mirror], psi[j] - psi[mirror]);
            hermite_functions(grid.point(j), n_max, &mut hf);
            for (k, (ck, hk)) in c.iter_mut().zip(&hf).enumerate() {
                *ck += hk * if k % 2 == 0 { even } else { odd };
            }
        }
    } else {
        for (j, &v) in psi.iter().enumerate() {
            hermite_functions(grid.point(j), n_max, &mut hf);
            for (ck, hk) in c.iter_mut().zip(&hf) {
                *ck += hk * v;
            }
        }
    }
    c.iter_mut().for_each(|v| *v *= h);
    let norm2: f64 = c.iter().map(|v| v * v).sum();
    let top: f64 = c[n_max.saturating_sub(4)..].iter().map(|v| v * v).sum();
    let wf_norm2: f64 = h * psi.iter().map(|v| v * v).sum::<f64>();
    let tail = (wf_norm2 - norm2).max(0.0) + top;
    if tail > TAIL_TOL {
        return Err(Error::Truncation { n_max, tail });
    }
    Ok(c)
}

/// A pure two-mode state.
#[derive(Debug, Clone, PartialEq)]
pub enum TwoModeState {
    /// `values[(i, j)] = Psi(y1_i, y2_j)`, normalized with weight `h1 h2`.
    Grid {
        grid1: Grid1D,
        grid2: Grid1D,
        values: DMatrix<f64>,
    },
    /// `amps[(n1, n2)] = <n1, n2 | Psi>`.
    Fock { amps: DMatrix<f64> },
}

impl TwoModeState {
    pub fn norm(&self) -> f64 {
        match self {
            TwoModeState::Grid { grid1, grid2, values } => {
                (values.norm_squared() * grid1.spacing * grid2.spacing).sqrt()
            }
            TwoModeState::Fock { amps } => amps.norm(),
        }
    }
}

/// Log of `n!` for `n = 0..=n_max`.
fn ln_factorials(n_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for n in 1..=n_max {
        acc += (n as f64).ln();
        out.push(acc);
    }
    out
}

/// Applies the two-mode rotation to `(sum_n c_n |n>) (x) |0>`.
///
/// With `y1 = c x1 + s x2`, `c = cos(theta/2)`, `s = sin(theta/2)`, the
/// collective creation operator is `b1^dag = c a1^dag + s a2^dag`, hence
/// `|n, 0> -> sum_k sqrt(C(n, k)) c^k s^(n-k) |k, n-k>`.
pub fn beam_splitter_rotate(c1: &[f64], theta: f64) -> TwoModeState {
    let n_max = c1.len().saturating_sub(1);
    let (c, s) = ((0.5 * theta).cos(), (0.5 * theta).sin());
    let lf = ln_factorials(n_max);
    let (lc, ls) = (c.abs().ln(), s.abs().ln());
    let mut amps = DMatrix::<f64>::zeros(n_max + 1, n_max + 1);
    for (n, &cn) in c1.iter().enumerate() {
        if cn == 0.0 {
            continue;
        }
        for k in 0..=n {
            let j = n - k;
            // Avoid 0 * ln(0) when c or s vanishes.
            let mut log_mag = 0.5 * (lf[n] - lf[k] - lf[j]);
            if k > 0 {
                log_mag += k as f64 * lc;
            }
            if j > 0 {
                log_mag += j as f64 * ls;
            }
            let mut sign = 1.0;
            if c < 0.0 && k % 2 == 1 {
                sign = -sign;
            }
            if s < 0.0 && j % 2 == 1 {
                sign = -sign;
            }
            amps[(k, j)] += cn * sign * log_mag.exp();
        }
    }
    TwoModeState::Fock { amps }
}
