//! Finite-difference ground state of the collective mode,
//! `H = -1/2 d^2/dy^2 + V(y)`.

use super::grid::Grid1D;
use super::tridiag;
use crate::error::{Error, Result};
use crate::fixed_points::{find_fixed_points, Stability};
use crate::potential::{CatastrophePotential, Model};

/// Largest wavefunction magnitude tolerated at the domain edges.
pub const EDGE_TOL: f64 = 1e-6;

/// A one-dimensional even potential.
pub trait Potential1D: Sync {
    fn value(&self, y: f64) -> f64;
    /// Lowest well-bottom energy, outermost well location and largest well
    /// curvature. Used only to size grids.
    fn wells(&self) -> Result<WellSummary>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellSummary {
    pub v_min: f64,
    pub outermost: f64,
    pub max_curvature: f64,
}

/// `V = epsilon^2 y^2 / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Harmonic {
    pub epsilon: f64,
}

impl Potential1D for Harmonic {
    fn value(&self, y: f64) -> f64 {
        0.5 * self.epsilon * self.epsilon * y * y
    }

    fn wells(&self) -> Result<WellSummary> {
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidParameter {
                key: "epsilon".into(),
                reason: "must be positive".into(),
            });
        }
        Ok(WellSummary {
            v_min: 0.0,
            outermost: 0.0,
            max_curvature: self.epsilon * self.epsilon,
        })
    }
}

impl Potential1D for CatastrophePotential {
    fn value(&self, y: f64) -> f64 {
        self.eval1(y)
    }

    fn wells(&self) -> Result<WellSummary> {
        if self.model() == Model::Molar {
            return Err(Error::Contract("molar potential is two-dimensional".into()));
        }
        let fps = find_fixed_points(self)?;
        let mut out = WellSummary {
            v_min: f64::INFINITY,
            outermost: 0.0,
            max_curvature: 0.0,
        };
        for fp in &fps {
            if fp.stability == Stability::Unstable {
                continue;
            }
            out.v_min = out.v_min.min(fp.well_energy);
            out.outermost = out.outermost.max(fp.location[0].abs());
            out.max_curvature = out.max_curvature.max(fp.hessian_eigenvalues[0]);
        }
        if !out.v_min.is_finite() {
            return Err(Error::NoStablePoint);
        }
        Ok(out)
    }
}

/// Half-width of a symmetric domain whose edges sit deep in the classically
/// forbidden region: the tunnelling action from the turning point of
/// `E = v_min + 10` out to the edge is at least 30, so the ground state has
/// decayed below roughly `e^-30` there.
pub fn domain_half_width<P: Potential1D + ?Sized>(p: &P) -> Result<f64> {
    let w = p.wells()?;
    let e_ref = w.v_min + 10.0;
    let step = 0.01;
    let mut y = w.outermost;
    let mut action = 0.0;
    let mut steps = 0usize;
    while action < 30.0 {
        let v = p.value(y);
        if v > e_ref {
            action += (2.0 * (v - e_ref)).sqrt() * step;
        }
        y += step;
        steps += 1;
        if steps > 10_000_000 {
            return Err(Error::Unbounded);
        }
    }
    Ok(y.max(6.0))
}

/// Lowest eigenpair on `grid`. The wavefunction is normalized so that
/// `h * sum(psi^2) = 1` and has a nonnegative integral.
///
/// On a symmetric grid the solve is restricted to the even sector, which
/// holds the ground state of any even potential. This keeps the problem well
/// conditioned even when the even/odd tunnelling splitting underflows.
pub fn solve_1d_ground_state<P: Potential1D + ?Sized>(p: &P, grid: &Grid1D) -> Result<(f64, Vec<f64>)> {
    let h = grid.spacing;
    let kin = 0.5 / (h * h);
    let n = grid.n_points;
    let mut psi = if grid.is_symmetric() {
        let half = n / 2;
        let mut diag: Vec<f64> = (0..half).map(|k| 2.0 * kin + p.value(grid.point(half + k))).collect();
        diag[0] -= kin;
        let off = vec![-kin; half - 1];
        let (e, v) = tridiag::lowest_eigenpair(&diag, &off)?;
        let mut full = vec![0.0; n];
        for k in 0..half {
            full[half + k] = v[k];
            full[half - 1 - k] = v[k];
        }
        (e, full)
    } else {
        let diag: Vec<f64> = grid.points().map(|y| 2.0 * kin + p.value(y)).collect();
        let off = vec![-kin; n - 1];
        tridiag::lowest_eigenpair(&diag, &off)?
    };
    let norm = (h * psi.1.iter().map(|v| v * v).sum::<f64>()).sqrt();
    psi.1.iter_mut().for_each(|v| *v /= norm);
    if psi.1.iter().sum::<f64>() < 0.0 {
        psi.1.iter_mut().for_each(|v| *v = -*v);
    }
    let edge = psi.1[0].abs().max(psi.1[n - 1].abs());
    if edge > EDGE_TOL {
        return Err(Error::DomainTooSmall { edge_amplitude: edge });
    }
    Ok(psi)
}
