//! Finite-`mu` entropy: ground state, bare-mode rotation, partial trace.

use log::debug;

use super::density::{reduced_density_matrix, von_neumann_entropy};
use super::fock::{beam_splitter_rotate, fock_coefficients};
use super::grid::Grid1D;
use super::solve1d::{domain_half_width, solve_1d_ground_state, Potential1D};
use crate::error::{Error, Result};
use crate::potential::{CatastrophePotential, Model};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericSettings {
    /// Refinement stops once successive levels differ by less than this.
    pub tolerance: f64,
    pub max_levels: usize,
    /// Coarsest 1D spacing; chosen from the well curvature when `None`.
    pub initial_spacing: Option<f64>,
    /// Coarsest 2D grid (points per axis).
    pub initial_points_2d: usize,
    /// Upper bound on the total number of 2D grid points.
    pub max_points_2d: usize,
}

impl Default for NumericSettings {
    fn default() -> Self {
        Self {
            tolerance: 1e-4,
            max_levels: 7,
            initial_spacing: None,
            initial_points_2d: 64,
            max_points_2d: 512 * 512,
        }
    }
}

/// Result of an adaptive computation.
#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    /// Richardson-extrapolated entropy from the two finest levels.
    pub entropy: f64,
    /// Raw entropy per level, coarsest first.
    pub history: Vec<f64>,
    /// Finest resolution used.
    pub resolution: Resolution,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Resolution {
    OneD { half_width: f64, spacing: f64 },
    TwoD { half_width: f64, points: usize },
}

/// One entropy evaluation of a 1D model on `grid`, rotated by `theta` into
/// the bare modes. Returns the entropy and the Fock truncation used.
pub fn entropy_1d_on_grid<P: Potential1D + ?Sized>(p: &P, theta: f64, grid: &Grid1D) -> Result<(f64, usize)> {
    let (_, psi) = solve_1d_ground_state(p, grid)?;
    let h = grid.spacing;
    let y2: f64 = grid.points().zip(&psi).map(|(y, v)| y * y * v * v).sum::<f64>() * h;
    let mut n_max = (4.0 * y2.max(10.0)).ceil() as usize;
    let c = loop {
        match fock_coefficients(&psi, grid, n_max) {
            Ok(c) => break c,
            Err(Error::Truncation { .. }) if n_max < 20_000 => n_max += n_max / 2,
            Err(e) => return Err(e),
        }
    };
    let state = beam_splitter_rotate(&c, theta);
    let rdm = reduced_density_matrix(&state, 1)?;
    Ok((von_neumann_entropy(&rdm)?, n_max))
}

fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

/// Converged when either the raw entropies or their successive Richardson
/// extrapolations agree to `tol`; returns the finest extrapolation.
pub(crate) fn converged(history: &[f64], tol: f64) -> Option<f64> {
    match history {
        [.., a, b, c] => {
            let (r0, r1) = (richardson(*a, *b), richardson(*b, *c));
            ((c - b).abs() < tol || (r1 - r0).abs() < tol).then_some(r1.max(0.0))
        }
        [a, b] => ((b - a).abs() < tol).then_some(richardson(*a, *b).max(0.0)),
        _ => None,
    }
}

fn default_spacing<P: Potential1D + ?Sized>(p: &P) -> Result<f64> {
    let w = p.wells()?;
    Ok(0.2 / w.max_curvature.max(1.0).sqrt().sqrt())
}

/// Entropy at a fixed domain and spacing, extrapolated from spacings `2h`
/// and `h`. Smooth in the model parameters, which is what peak refinement
/// needs.
pub fn entropy_1d_fixed<P: Potential1D + ?Sized>(p: &P, theta: f64, half_width: f64, spacing: f64) -> Result<f64> {
    let coarse = Grid1D::symmetric(half_width, 2.0 * spacing)?;
    let fine = coarse.refined();
    let (s0, _) = entropy_1d_on_grid(p, theta, &coarse)?;
    let (s1, _) = entropy_1d_on_grid(p, theta, &fine)?;
    Ok(richardson(s0, s1))
}

/// Halves the spacing until the raw entropy changes by less than the
/// tolerance between levels, enlarging the domain if the wavefunction
/// reaches its edge.
pub fn refine_1d<P: Potential1D + ?Sized>(p: &P, theta: f64, settings: &NumericSettings) -> Result<Refinement> {
    let mut half_width = domain_half_width(p)?;
    let h0 = match settings.initial_spacing {
        Some(h) => h,
        None => default_spacing(p)?,
    };
    'domain: for _ in 0..6 {
        let mut grid = Grid1D::symmetric(half_width, h0)?;
        let mut history: Vec<f64> = Vec::new();
        for _ in 0..settings.max_levels {
            let s = match entropy_1d_on_grid(p, theta, &grid) {
                Ok((s, _)) => s,
                Err(Error::DomainTooSmall { .. }) => {
                    half_width *= 1.5;
                    continue 'domain;
                }
                Err(e) => return Err(e),
            };
            debug!("1d level h={:.5} S={s:.10}", grid.spacing);
            history.push(s);
            if let Some(entropy) = converged(&history, settings.tolerance) {
                return Ok(Refinement {
                    entropy,
                    history,
                    resolution: Resolution::OneD {
                        half_width,
                        spacing: grid.spacing,
                    },
                });
            }
            grid = grid.refined();
        }
        return Err(Error::RefinementNonConvergence { history });
    }
    Err(Error::DomainTooSmall {
        edge_amplitude: f64::NAN,
    })
}

/// Entropy at the resolution of an earlier refinement, on a domain at least
/// `min_half_width` wide. Deterministic and smooth in the model parameters.
pub fn entropy_at_resolution(
    p: &CatastrophePotential,
    resolution: Resolution,
    min_half_width: f64,
    settings: &NumericSettings,
) -> Result<f64> {
    match (p.model(), resolution) {
        (Model::Cusp | Model::Butterfly, Resolution::OneD { half_width, spacing }) => {
            entropy_1d_fixed(p, p.theta(), half_width.max(min_half_width), spacing)
        }
        (Model::Molar, Resolution::TwoD { half_width, points }) => {
            let hw = half_width.max(min_half_width);
            // Keep the spacing when the domain grows.
            let n = 2 * ((points / 2) as f64 * hw / half_width / 2.0).round() as usize;
            super::solve2d::molar_entropy_fixed(p, hw, n.max(16), settings.max_points_2d)
        }
        _ => Err(Error::Contract("resolution does not match the model dimension".into())),
    }
}

/// Domain half-width the adaptive solver would start from.
pub fn natural_half_width(p: &CatastrophePotential) -> Result<f64> {
    match p.model() {
        Model::Cusp | Model::Butterfly => domain_half_width(p),
        Model::Molar => super::solve2d::molar_half_width(p),
    }
}

/// Adaptive finite-`mu` entropy between the two bare modes, in bits.
pub fn finite_mu_entropy(p: &CatastrophePotential) -> Result<f64> {
    finite_mu_entropy_with(p, &NumericSettings::default()).map(|r| r.entropy)
}

pub fn finite_mu_entropy_with(p: &CatastrophePotential, settings: &NumericSettings) -> Result<Refinement> {
    match p.model() {
        Model::Cusp | Model::Butterfly => refine_1d(p, p.theta(), settings),
        Model::Molar => super::solve2d::refine_molar(p, settings),
    }
}
