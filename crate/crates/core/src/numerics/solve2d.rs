//! Ground state of the molar model on a square grid with the 5-point
//! Laplacian.
//!
//! The potential is even in `y1` and in `y2` separately and the ground state
//! is nodeless, so it lies in the sector even under both reflections. The
//! operator is restricted to the positive quadrant with mirror boundary
//! conditions at the axes, which reproduces the full-grid operator on that
//! sector exactly.

use log::{debug, warn};
use nalgebra::DMatrix;

use super::density::entropy_of_spectrum;
use super::fock::TwoModeState;
use super::grid::Grid1D;
use super::lanczos::{lowest_eigenpair, LanczosOptions, LinearOperator};
use super::pipeline::{converged, NumericSettings, Refinement, Resolution};
use super::solve1d::EDGE_TOL;
use crate::error::{Error, Result};
use crate::fixed_points::find_fixed_points;
use crate::potential::{CatastrophePotential, Model};

/// Minimum spectral gap accepted between the two lowest states.
pub const MIN_GAP: f64 = 1e-8;
/// Gaps below this trigger a tighter eigensolve and a warning.
pub const SMALL_GAP: f64 = 1e-4;

/// Quadrant-restricted Hamiltonian. Index `i * n + j` holds
/// `psi(y_i, y_j)` with `y_k = (k + 1/2) h`.
struct QuadrantOperator {
    n: usize,
    kin: f64,
    diag: Vec<f64>,
}

impl QuadrantOperator {
    fn new(p: &CatastrophePotential, n: usize, h: f64) -> Self {
        let kin = 0.5 / (h * h);
        let mut diag = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let (y1, y2) = ((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
                // Mirror images at k = -1 equal the k = 0 values.
                let mirror = (i == 0) as u8 + (j == 0) as u8;
                diag[i * n + j] = (4.0 - mirror as f64) * kin + p.eval2(y1, y2);
            }
        }
        Self { n, kin, diag }
    }
}

impl LinearOperator for QuadrantOperator {
    fn dim(&self) -> usize {
        self.n * self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.n;
        let k = self.kin;
        for i in 0..n {
            for j in 0..n {
                let idx = i * n + j;
                let mut s = self.diag[idx] * x[idx];
                if i > 0 {
                    s -= k * x[idx - n];
                }
                if i + 1 < n {
                    s -= k * x[idx + n];
                }
                if j > 0 {
                    s -= k * x[idx - 1];
                }
                if j + 1 < n {
                    s -= k * x[idx + 1];
                }
                y[idx] = s;
            }
        }
    }
}

/// Ground state restricted to the positive quadrant.
#[derive(Debug, Clone)]
pub struct QuadrantState {
    /// Points per axis in the quadrant.
    pub n: usize,
    pub spacing: f64,
    /// Row-major `n x n` values, normalized over the full plane.
    pub values: Vec<f64>,
    pub energy: f64,
    /// Distance to the next Ritz value in the same symmetry sector.
    pub gap: f64,
}

impl QuadrantState {
    /// Expands to the full symmetric grid.
    pub fn to_two_mode_state(&self) -> Result<TwoModeState> {
        let n = self.n;
        let half_width = n as f64 * self.spacing;
        let grid = Grid1D::new(-half_width, half_width, 2 * n)?;
        let values = DMatrix::from_fn(2 * n, 2 * n, |a, b| {
            let i = if a >= n { a - n } else { n - 1 - a };
            let j = if b >= n { b - n } else { n - 1 - b };
            self.values[i * n + j]
        });
        Ok(TwoModeState::Grid {
            grid1: grid,
            grid2: grid,
            values,
        })
    }

    /// Entropy of the `y1` reduced state in bits.
    ///
    /// Only the `y1`-even subspace carries weight; on it the quadrature
    /// kernel reduces to `4 h^2 Q Q^T` with `Q` the quadrant values.
    pub fn entropy(&self) -> Result<f64> {
        let n = self.n;
        let q = DMatrix::from_row_slice(n, n, &self.values);
        let rho = (&q * q.transpose()) * (4.0 * self.spacing * self.spacing);
        let spectrum: Vec<f64> = rho.symmetric_eigenvalues().iter().copied().collect();
        entropy_of_spectrum(&spectrum)
    }
}

fn molar_check(p: &CatastrophePotential) -> Result<()> {
    if p.model() != Model::Molar {
        return Err(Error::Contract("two-dimensional solver needs the molar model".into()));
    }
    Ok(())
}

/// Half-width `max |fixed point| + 6` of the square domain.
pub fn molar_half_width(p: &CatastrophePotential) -> Result<f64> {
    molar_check(p)?;
    let r = find_fixed_points(p)?
        .iter()
        .map(|fp| fp.location.iter().fold(0.0f64, |m, v| m.max(v.abs())))
        .fold(0.0, f64::max);
    Ok(r + 6.0)
}

/// Lowest eigenpair on the quadrant grid with `n` points per axis over
/// `[0, half_width]`. `start` (same layout) seeds the iteration.
pub fn solve_molar_quadrant(
    p: &CatastrophePotential,
    half_width: f64,
    n: usize,
    start: Option<&[f64]>,
    max_points: usize,
) -> Result<QuadrantState> {
    molar_check(p)?;
    let full = 4 * n * n;
    if full > max_points {
        return Err(Error::GridTooLarge {
            points: full,
            cap: max_points,
        });
    }
    let h = half_width / n as f64;
    let op = QuadrantOperator::new(p, n, h);
    let start: Vec<f64> = match start {
        Some(s) => s.to_vec(),
        None => {
            // Positive and symmetric under y1 <-> y2, so the Krylov space
            // stays in the fully symmetric sector.
            let mut v = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    let (y1, y2) = ((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
                    let e = (p.eval2(y1, y2) - p.eval2(0.0, 0.0)).min(50.0);
                    v[i * n + j] = (-0.5 * e).exp() + 1e-3;
                }
            }
            v
        }
    };
    let mut opts = LanczosOptions {
        krylov_dim: 80,
        max_restarts: 2000,
        tolerance: 1e-9,
    };
    let mut res = lowest_eigenpair(&op, &start, &opts)?;
    let mut gap = res.next_eigenvalue - res.eigenvalue;
    if gap < SMALL_GAP {
        warn!("small spectral gap {gap:e}; tightening the eigensolver");
        opts.tolerance = 1e-12;
        res = lowest_eigenpair(&op, &res.eigenvector, &opts)?;
        gap = res.next_eigenvalue - res.eigenvalue;
    }
    if gap < MIN_GAP {
        return Err(Error::Degenerate { gap });
    }
    debug!(
        "molar n={n} h={h:.4} E={:.10} gap={gap:.3e} matvecs={}",
        res.eigenvalue, res.matvecs
    );
    let mut values = res.eigenvector;
    let norm = (4.0 * h * h * values.iter().map(|v| v * v).sum::<f64>()).sqrt();
    let sign = if values.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    values.iter_mut().for_each(|v| *v *= sign / norm);
    let edge = (0..n)
        .map(|k| values[k * n + n - 1].abs().max(values[(n - 1) * n + k].abs()))
        .fold(0.0, f64::max);
    if edge > EDGE_TOL {
        return Err(Error::DomainTooSmall { edge_amplitude: edge });
    }
    Ok(QuadrantState {
        n,
        spacing: h,
        values,
        energy: res.eigenvalue,
        gap,
    })
}

/// Full-plane ground state on a symmetric square grid (both axes `grid`).
pub fn solve_2d_ground_state(
    p: &CatastrophePotential,
    grid: &Grid1D,
    max_points: usize,
) -> Result<(f64, TwoModeState)> {
    if !grid.is_symmetric() {
        return Err(Error::Contract("molar grid must be symmetric about 0".into()));
    }
    let q = solve_molar_quadrant(p, grid.y_max, grid.n_points / 2, None, max_points)?;
    Ok((q.energy, q.to_two_mode_state()?))
}

/// Doubles the resolution of a quadrant state by piecewise-constant
/// prolongation; used only as a start vector.
fn prolong(values: &[f64], n: usize) -> Vec<f64> {
    let m = 2 * n;
    let mut out = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            out[i * m + j] = values[(i / 2) * n + j / 2];
        }
    }
    out
}

/// Entropy at a fixed domain and quadrant resolution `n`, extrapolated from
/// resolutions `n / 2` and `n`.
pub fn molar_entropy_fixed(p: &CatastrophePotential, half_width: f64, n: usize, max_points: usize) -> Result<f64> {
    let coarse = solve_molar_quadrant(p, half_width, n / 2, None, max_points)?;
    let start = prolong(&coarse.values, n / 2);
    let fine = solve_molar_quadrant(p, half_width, 2 * (n / 2), Some(&start), max_points)?;
    let (s0, s1) = (coarse.entropy()?, fine.entropy()?);
    Ok((4.0 * s1 - s0) / 3.0)
}

/// Doubles the resolution until the entropy converges.
pub fn refine_molar(p: &CatastrophePotential, settings: &NumericSettings) -> Result<Refinement> {
    let mut half_width = molar_half_width(p)?;
    'domain: for _ in 0..4 {
        let mut n = (settings.initial_points_2d / 2).max(16);
        let mut history = Vec::new();
        let mut start: Option<Vec<f64>> = None;
        for _ in 0..settings.max_levels {
            let q = match solve_molar_quadrant(p, half_width, n, start.as_deref(), settings.max_points_2d) {
                Ok(q) => q,
                Err(Error::DomainTooSmall { .. }) => {
                    half_width *= 1.5;
                    continue 'domain;
                }
                Err(Error::GridTooLarge { .. }) => break,
                Err(e) => return Err(e),
            };
            let s = q.entropy()?;
            debug!("molar level n={n} S={s:.10}");
            history.push(s);
            if let Some(entropy) = converged(&history, settings.tolerance) {
                return Ok(Refinement {
                    entropy,
                    history,
                    resolution: Resolution::TwoD {
                        half_width,
                        points: 2 * n,
                    },
                });
            }
            start = Some(prolong(&q.values, n));
            n *= 2;
        }
        return Err(Error::RefinementNonConvergence { history });
    }
    Err(Error::DomainTooSmall {
        edge_amplitude: f64::NAN,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::density::{reduced_density_matrix, von_neumann_entropy};

    #[test]
    fn quadrant_operator_matches_full_stencil_on_even_functions() {
        let p = CatastrophePotential::molar(-1.0, 2.0, 5.0).unwrap();
        let n = 6;
        let h = 0.7;
        let op = QuadrantOperator::new(&p, n, h);
        let f = |y1: f64, y2: f64| (-(y1 * y1 + 2.0 * y2 * y2) / 8.0).exp();
        let x: Vec<f64> = (0..n * n)
            .map(|k| f((k / n) as f64 * h + 0.5 * h, (k % n) as f64 * h + 0.5 * h))
            .collect();
        let mut y = vec![0.0; n * n];
        op.apply(&x, &mut y);
        let kin = 0.5 / (h * h);
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                let (y1, y2) = ((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
                let lap = f(y1 + h, y2) + f(y1 - h, y2) + f(y1, y2 + h) + f(y1, y2 - h) - 4.0 * f(y1, y2);
                let expected = -kin * lap + p.eval2(y1, y2) * f(y1, y2);
                assert!((y[i * n + j] - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn separable_harmonic_limit() {
        // gamma = 0 with large mu: two decoupled oscillators, no entanglement.
        let p = CatastrophePotential::molar(1.0, 0.0, 1e6).unwrap();
        let q = solve_molar_quadrant(&p, 8.0, 64, None, 1 << 20).unwrap();
        assert!((q.energy - 1.0).abs() < 1e-3);
        assert!(q.entropy().unwrap() < 1e-8);
    }

    #[test]
    fn quadrant_entropy_matches_generic_partial_trace() {
        let p = CatastrophePotential::molar(-1.0, 0.5, 4.0).unwrap();
        let hw = molar_half_width(&p).unwrap();
        let q = solve_molar_quadrant(&p, hw, 40, None, 1 << 20).unwrap();
        let state = q.to_two_mode_state().unwrap();
        assert!((state.norm() - 1.0).abs() < 1e-10);
        let s1 = von_neumann_entropy(&reduced_density_matrix(&state, 1).unwrap()).unwrap();
        let s0 = von_neumann_entropy(&reduced_density_matrix(&state, 0).unwrap()).unwrap();
        let sq = q.entropy().unwrap();
        assert!((s1 - sq).abs() < 1e-9, "{s1} vs {sq}");
        assert!((s0 - s1).abs() < 1e-8);
    }

    #[test]
    fn full_grid_state_is_symmetric() {
        let p = CatastrophePotential::molar(-1.0, 2.0, 6.0).unwrap();
        let hw = molar_half_width(&p).unwrap();
        let g = Grid1D::symmetric(hw, 0.25).unwrap();
        let (_, s) = solve_2d_ground_state(&p, &g, 1 << 20).unwrap();
        let TwoModeState::Grid { values, .. } = s else {
            unreachable!()
        };
        let n = values.nrows();
        for a in 0..n {
            for b in 0..n {
                assert_eq!(values[(a, b)], values[(n - 1 - a, b)]);
                assert!((values[(a, b)] - values[(b, a)]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn grid_cap_enforced() {
        let p = CatastrophePotential::molar(-1.0, 2.0, 6.0).unwrap();
        assert!(matches!(
            solve_molar_quadrant(&p, 10.0, 100, None, 1000),
            Err(Error::GridTooLarge { .. })
        ));
    }
}
