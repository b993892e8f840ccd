//! Classical fixed points of the catastrophe potentials and the harmonic
//! excitations about them.
//!
//! Stationarity conditions of all three models are polynomial in `y^2`, so
//! candidates come from closed-form roots. A Newton step then polishes each
//! candidate so that the gradient contract holds to machine precision.

use log::info;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{check_bounded_below, CatastrophePotential, Controls};

/// Hessian eigenvalues with `|lambda| <= STABILITY_TOL` are marginal.
pub const STABILITY_TOL: f64 = 1e-12;

/// Relative tolerance used to decide that two well energies are degenerate.
pub const DEGENERACY_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
    /// A Hessian eigenvalue sits within `STABILITY_TOL` of zero: the point is critical.
    Marginal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub location: Vec<f64>,
    pub stability: Stability,
    /// Hessian eigenvalues, ordered like `excitation_energies`.
    pub hessian_eigenvalues: Vec<f64>,
    /// `sqrt` of the Hessian eigenvalues; empty unless the point is stable.
    /// For 2D points the first entry is the mode along the displacement.
    pub excitation_energies: Vec<f64>,
    /// Angle in `[0, pi/2)` between the normal modes and the `y` axes (2D only).
    pub normal_mode_angle: Option<f64>,
    /// Well-bottom energy `V(location)`.
    pub well_energy: f64,
}

impl FixedPoint {
    pub fn is_stable(&self) -> bool {
        self.stability == Stability::Stable
    }
}

/// Locates every real stationary point of `p`, classifies it and attaches
/// its excitation spectrum.
pub fn find_fixed_points(p: &CatastrophePotential) -> Result<Vec<FixedPoint>> {
    if !check_bounded_below(p) {
        return Err(Error::Unbounded);
    }
    let mu = p.mu();
    let mut candidates: Vec<Vec<f64>> = vec![vec![0.0; p.model().dimension()]];
    match p.controls() {
        Controls::Cusp { a } => {
            // y (y^2 / mu + A) = 0
            for u in positive_roots(&[a, 1.0]) {
                let y = (mu * u).sqrt();
                candidates.push(vec![-y]);
                candidates.push(vec![y]);
            }
        }
        Controls::Butterfly { a2, a4 } => {
            // y (A2 + A4 u + u^2) = 0 with u = y^2 / mu
            for u in positive_roots(&[a2, a4, 1.0]) {
                let y = (mu * u).sqrt();
                candidates.push(vec![-y]);
                candidates.push(vec![y]);
            }
        }
        Controls::Molar { a, gamma } => {
            if a < 0.0 {
                let axis = (-a * mu).sqrt();
                candidates.extend([vec![axis, 0.0], vec![-axis, 0.0], vec![0.0, axis], vec![0.0, -axis]]);
                // On the diagonals y1^2 = y2^2 = -A mu / (1 + gamma). At gamma = 1
                // these coincide with the ring through the axis points.
                if gamma != 1.0 {
                    let d = (-a * mu / (1.0 + gamma)).sqrt();
                    for (s1, s2) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                        candidates.push(vec![s1 * d, s2 * d]);
                    }
                }
            }
        }
    }

    let mut points = Vec::with_capacity(candidates.len());
    for c in candidates {
        let loc = polish(p, c)?;
        if points
            .iter()
            .any(|q: &FixedPoint| distance(&q.location, &loc) < 1e-9 * (1.0 + norm(&loc)))
        {
            continue;
        }
        points.push(classify(p, loc)?);
    }
    Ok(points)
}

/// Excitation energies about a stable fixed point, recomputed from the Hessian.
///
/// For 2D points the normal-mode angle is returned alongside.
pub fn excitation_energies(p: &CatastrophePotential, fp: &FixedPoint) -> Result<(Vec<f64>, Option<f64>)> {
    let fresh = classify(p, fp.location.clone())?;
    match fresh.stability {
        Stability::Stable => Ok((fresh.excitation_energies, fresh.normal_mode_angle)),
        Stability::Unstable => Err(Error::UnstablePoint {
            location: fresh.location,
        }),
        Stability::Marginal => Err(marginal_error(&fresh)),
    }
}

pub(crate) fn marginal_error(fp: &FixedPoint) -> Error {
    let eigenvalue = fp
        .hessian_eigenvalues
        .iter()
        .copied()
        .min_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(0.0);
    Error::MarginalPoint {
        location: fp.location.clone(),
        eigenvalue,
    }
}

fn classify(p: &CatastrophePotential, loc: Vec<f64>) -> Result<FixedPoint> {
    let hess = p.hessian(&loc)?;
    let well_energy = p.eval(&loc)?;
    let (eigenvalues, angle) = match hess.as_slice() {
        [h] => (vec![*h], None),
        [h11, h12, _, h22] => {
            let (lams, angle) = ordered_modes(*h11, *h12, *h22, &loc);
            (lams.to_vec(), Some(angle))
        }
        _ => unreachable!(),
    };
    let stability = if eigenvalues.iter().any(|&l| l.abs() <= STABILITY_TOL) {
        Stability::Marginal
    } else if eigenvalues.iter().all(|&l| l > 0.0) {
        Stability::Stable
    } else {
        Stability::Unstable
    };
    if stability == Stability::Marginal {
        info!("marginal fixed point at {loc:?}: Hessian eigenvalues {eigenvalues:?}");
    }
    let excitation_energies = if stability == Stability::Stable {
        eigenvalues.iter().map(|l| l.sqrt()).collect()
    } else {
        Vec::new()
    };
    Ok(FixedPoint {
        location: loc,
        stability,
        hessian_eigenvalues: eigenvalues,
        excitation_energies,
        normal_mode_angle: angle,
        well_energy,
    })
}

/// Eigen-decomposes a symmetric 2x2 Hessian. The first eigenvalue belongs to
/// the mode most aligned with the displacement `loc` (or the larger one at the
/// origin); the angle is that mode's direction reduced to `[0, pi/2)`.
fn ordered_modes(h11: f64, h12: f64, h22: f64, loc: &[f64]) -> ([f64; 2], f64) {
    let mean = 0.5 * (h11 + h22);
    let half_diff = 0.5 * (h11 - h22);
    let radius = half_diff.hypot(h12);
    let (hi, lo) = (mean + radius, mean - radius);
    // Direction of the eigenvector for `hi`.
    let phi_hi = 0.5 * (2.0 * h12).atan2(h11 - h22);
    let phi_lo = phi_hi + std::f64::consts::FRAC_PI_2;
    let r = norm(loc);
    let (first, second, phi) = if r > 0.0 {
        let along = |phi: f64| ((loc[0] * phi.cos() + loc[1] * phi.sin()) / r).abs();
        if along(phi_hi) >= along(phi_lo) {
            (hi, lo, phi_hi)
        } else {
            (lo, hi, phi_lo)
        }
    } else {
        (hi, lo, phi_hi)
    };
    let quarter = std::f64::consts::FRAC_PI_2;
    let mut angle = phi.rem_euclid(quarter);
    if quarter - angle < 1e-12 {
        angle = 0.0;
    }
    ([first, second], angle)
}

/// Positive real roots of `c0 + c1 u + c2 u^2 + ...` (degree <= 2).
fn positive_roots(coeffs: &[f64]) -> Vec<f64> {
    let roots = match coeffs {
        [c0, c1] => vec![-c0 / c1],
        [c0, c1, c2] => {
            let disc = c1 * c1 - 4.0 * c2 * c0;
            if disc < 0.0 {
                vec![]
            } else {
                // Numerically stable pair.
                let q = -0.5 * (c1 + c1.signum() * disc.sqrt());
                if q == 0.0 {
                    vec![0.0]
                } else {
                    vec![q / c2, c0 / q]
                }
            }
        }
        _ => unreachable!("stationarity polynomials are at most quadratic in y^2"),
    };
    let mut out: Vec<f64> = roots.into_iter().filter(|&u| u > 0.0).collect();
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs());
    out
}

fn polish(p: &CatastrophePotential, mut y: Vec<f64>) -> Result<Vec<f64>> {
    for _ in 0..8 {
        let g = p.gradient(&y)?;
        let v = p.eval(&y)?;
        if norm(&g) < 1e-13 * v.abs().max(1.0) {
            break;
        }
        let h = p.hessian(&y)?;
        match h.as_slice() {
            [h] if h.abs() > STABILITY_TOL => y[0] -= g[0] / h,
            [h11, h12, _, h22] => {
                let det = h11 * h22 - h12 * h12;
                if det.abs() <= STABILITY_TOL {
                    break;
                }
                y[0] -= (h22 * g[0] - h12 * g[1]) / det;
                y[1] -= (h11 * g[1] - h12 * g[0]) / det;
            }
            _ => break,
        }
    }
    let residual = norm(&p.gradient(&y)?);
    if residual >= 1e-10 * p.eval(&y)?.abs().max(1.0) {
        return Err(Error::FixedPointNonConvergence { residual });
    }
    Ok(y)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Critical exponents of the excitation gap: `eps ~ A^(z nu)` and the
/// correlation length `xi = eps^(-1/2) ~ A^(-nu)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalExponents {
    pub nu: f64,
    pub z: f64,
}

impl CriticalExponents {
    /// Correlation length associated with an excitation energy.
    pub fn xi(epsilon: f64) -> f64 {
        epsilon.powf(-0.5)
    }

    /// Measures the cusp exponents from the fixed-point spectrum on the
    /// symmetric side `A > 0` by log-log slopes over the given control values.
    pub fn measure_cusp(a_values: &[f64]) -> Result<Self> {
        if a_values.len() < 2 || a_values.iter().any(|&a| a <= 0.0) {
            return Err(Error::Contract("need at least two positive A values".into()));
        }
        let mut log_a = Vec::new();
        let mut log_eps = Vec::new();
        let mut log_xi = Vec::new();
        for &a in a_values {
            let p = CatastrophePotential::cusp(a, 1.0)?;
            let fp = find_fixed_points(&p)?
                .into_iter()
                .find(FixedPoint::is_stable)
                .ok_or(Error::NoStablePoint)?;
            let eps = fp.excitation_energies[0];
            log_a.push(a.ln());
            log_eps.push(eps.ln());
            log_xi.push(Self::xi(eps).ln());
        }
        let z_nu = slope(&log_a, &log_eps);
        let nu = -slope(&log_a, &log_xi);
        Ok(Self { nu, z: z_nu / nu })
    }
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::butterfly_default_a4;
    use approx::assert_abs_diff_eq;

    fn stable(points: &[FixedPoint]) -> Vec<&FixedPoint> {
        points.iter().filter(|f| f.is_stable()).collect()
    }

    #[test]
    fn cusp_double_well() {
        let p = CatastrophePotential::cusp(-1.0, 4.0).unwrap();
        let fps = find_fixed_points(&p).unwrap();
        let mut locs: Vec<f64> = stable(&fps).iter().map(|f| f.location[0]).collect();
        locs.sort_by(f64::total_cmp);
        assert_eq!(locs.len(), 2);
        assert_abs_diff_eq!(locs[0], -2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(locs[1], 2.0, epsilon = 1e-12);
        let origin = fps.iter().find(|f| f.location[0] == 0.0).unwrap();
        assert_eq!(origin.stability, Stability::Unstable);
    }

    #[test]
    fn butterfly_triple_well_region() {
        let p = CatastrophePotential::butterfly(0.5, butterfly_default_a4(), 1.0).unwrap();
        let fps = find_fixed_points(&p).unwrap();
        let s = stable(&fps);
        assert_eq!(s.len(), 3);
        let expected = ((2.0 + (4.0f64 - 1.5).sqrt()) / 3f64.sqrt()).sqrt();
        let max = s.iter().map(|f| f.location[0]).fold(f64::MIN, f64::max);
        assert_abs_diff_eq!(max, expected, epsilon = 1e-12);
        assert!(s.iter().any(|f| f.location[0] == 0.0));
    }

    #[test]
    fn molar_axis_wells() {
        let p = CatastrophePotential::molar(-1.0, 2.0, 9.0).unwrap();
        let fps = find_fixed_points(&p).unwrap();
        let s = stable(&fps);
        assert_eq!(s.len(), 4);
        for f in &s {
            let r = f.location[0].abs().max(f.location[1].abs());
            assert_abs_diff_eq!(r, 3.0, epsilon = 1e-12);
            assert!(f.location[0] == 0.0 || f.location[1] == 0.0);
        }
        let origin = fps.iter().find(|f| f.location == vec![0.0, 0.0]).unwrap();
        assert_eq!(origin.stability, Stability::Unstable);
    }

    #[test]
    fn molar_excitations_on_axis() {
        let mu = 7.0;
        let p = CatastrophePotential::molar(-1.0, 3.0, mu).unwrap();
        let fp = classify(&p, vec![mu.sqrt(), 0.0]).unwrap();
        let (eps, angle) = excitation_energies(&p, &fp).unwrap();
        assert_abs_diff_eq!(eps[0], 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(eps[1], 2f64.sqrt(), epsilon = 1e-12);
        assert_eq!(angle, Some(0.0));

        let p = CatastrophePotential::molar(-1.0, 1.8, mu).unwrap();
        let fp = classify(&p, vec![0.0, -mu.sqrt()]).unwrap();
        let (eps, angle) = excitation_energies(&p, &fp).unwrap();
        assert_abs_diff_eq!(eps[0] * eps[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eps[1] * eps[1], 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(angle.unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn molar_diagonal_excitations() {
        let gamma = 0.6;
        let p = CatastrophePotential::molar(-1.0, gamma, 5.0).unwrap();
        for f in stable(&find_fixed_points(&p).unwrap()) {
            assert_abs_diff_eq!(f.location[0].abs(), f.location[1].abs(), epsilon = 1e-12);
            assert_abs_diff_eq!(f.excitation_energies[0].powi(2), 2.0, epsilon = 1e-12);
            assert_abs_diff_eq!(
                f.excitation_energies[1].powi(2),
                2.0 * (1.0 - gamma) / (1.0 + gamma),
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(
                f.normal_mode_angle.unwrap(),
                std::f64::consts::FRAC_PI_4,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn butterfly_excitations_at_triple_point() {
        let p = CatastrophePotential::butterfly(1.0, butterfly_default_a4(), 1.0).unwrap();
        for f in stable(&find_fixed_points(&p).unwrap()) {
            let expected = if f.location[0] == 0.0 { 1.0 } else { 2.0 };
            assert_abs_diff_eq!(f.excitation_energies[0], expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn cusp_displaced_excitation_from_hessian() {
        // eps^2 = V'' = 3 y^2 / mu + A = 2 |A|; finite-difference oracle.
        let p = CatastrophePotential::cusp(-1.0, 1.0).unwrap();
        let h = 1e-4;
        for f in stable(&find_fixed_points(&p).unwrap()) {
            let y = f.location[0];
            let fd = (p.eval1(y + h) - 2.0 * p.eval1(y) + p.eval1(y - h)) / (h * h);
            assert_abs_diff_eq!(f.excitation_energies[0], 2f64.sqrt(), epsilon = 1e-12);
            assert_abs_diff_eq!(f.excitation_energies[0], fd.sqrt(), epsilon = 1e-6);
        }
    }

    #[test]
    fn unstable_point_rejected() {
        let p = CatastrophePotential::cusp(-1.0, 1.0).unwrap();
        let origin = classify(&p, vec![0.0]).unwrap();
        assert!(matches!(
            excitation_energies(&p, &origin),
            Err(Error::UnstablePoint { .. })
        ));
    }

    #[test]
    fn critical_cusp_is_marginal() {
        let p = CatastrophePotential::cusp(0.0, 1.0).unwrap();
        let fps = find_fixed_points(&p).unwrap();
        assert_eq!(fps.len(), 1);
        assert_eq!(fps[0].stability, Stability::Marginal);
        assert!(matches!(
            excitation_energies(&p, &fps[0]),
            Err(Error::MarginalPoint { .. })
        ));
    }

    #[test]
    fn unbounded_molar_rejected() {
        let p = CatastrophePotential::molar(-1.0, -1.5, 1.0).unwrap();
        assert_eq!(find_fixed_points(&p), Err(Error::Unbounded));
    }

    #[test]
    fn cusp_exponents() {
        let ex = CriticalExponents::measure_cusp(&[1e-2, 1e-4, 1e-6]).unwrap();
        assert_abs_diff_eq!(ex.nu, 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(ex.z, 2.0, epsilon = 1e-12);
    }
}
