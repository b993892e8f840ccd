//! Entanglement entropy in the macroscopic limit.
//!
//! About each stable well the ground state is a two-mode Gaussian whose
//! reduced density kernel `exp(-alpha (x^2 + x'^2) + beta x x')` is fixed,
//! up to normalization, by the single number `2 alpha / beta`. The entropy of
//! that kernel equals the entropy of a thermal oscillator with
//! `Omega / T = arccosh(2 alpha / beta)`. Multi-lobe ground states add a
//! mixing contribution computed from the macroscopic lobe geometry.

use std::collections::BTreeMap;
use std::f64::consts::{LN_2, PI};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixed_points::{find_fixed_points, FixedPoint, Stability, DEGENERACY_RTOL};
use crate::potential::{CatastrophePotential, Model};

/// Two-mode Gaussian ratio `2 alpha / beta` for one excitation energy
/// `epsilon1` (the other mode has unit frequency) mixed by angle `theta`.
pub fn ratio_general_theta(epsilon1: f64, theta: f64) -> Result<f64> {
    if !(epsilon1 > 0.0 && epsilon1.is_finite()) {
        return Err(Error::Domain(format!(
            "excitation energy must be positive, got {epsilon1}"
        )));
    }
    if theta == 0.0 || theta == PI {
        return Err(Error::NoMixing(theta));
    }
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::Domain(format!("theta = {theta} outside (0, pi)")));
    }
    if epsilon1 == 1.0 {
        return Ok(f64::INFINITY);
    }
    let half = 0.5 * theta;
    let (t, ct) = (half.tan(), 1.0 / half.tan());
    let num = (epsilon1 + 1.0).powi(2) + 2.0 * epsilon1 * (ct * ct + t * t);
    Ok(num / (epsilon1 - 1.0).powi(2))
}

/// Von Neumann entropy in bits of a Gaussian reduced state with ratio `2 alpha / beta`.
pub fn entropy_from_ratio(ratio: f64) -> Result<f64> {
    if ratio.is_nan() || ratio < 1.0 {
        return Err(Error::Domain(format!(
            "2 alpha / beta = {ratio} < 1: arccosh undefined"
        )));
    }
    if ratio == 1.0 {
        return Ok(f64::INFINITY);
    }
    if ratio.is_infinite() {
        return Ok(0.0);
    }
    let x = ratio.acosh();
    // (x/2) coth(x/2) - ln(2 sinh(x/2)) == x / (e^x - 1) - ln(1 - e^-x)
    let nats = x / x.exp_m1() - (-(-x).exp()).ln_1p();
    Ok((nats / LN_2).max(0.0))
}

/// Closed-form ratio for a single diagonal lobe of the molar catastrophe,
/// `0 < gamma < 1`.
pub fn ratio_molar_diagonal(gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Domain(format!(
            "diagonal molar lobes need 0 < gamma < 1, got {gamma}"
        )));
    }
    let g2 = gamma * gamma;
    Ok((4.0 - 3.0 * g2 + 4.0 * (1.0 - g2).sqrt()) / g2)
}

/// Ratio for the Gaussian ground state of `(p1^2 + p2^2)/2 + y^T K y / 2`,
/// with the partition taken along the `y` axes. `k` is `[k11, k12, k22]`.
///
/// The ground state is `exp(-y^T M y / 2)` with `M = sqrt(K)`, and tracing out
/// `y2` gives `2 alpha / beta = 2 M11 M22 / M12^2 - 1`.
pub fn ratio_from_stiffness(k: [f64; 3]) -> Result<f64> {
    let [k11, k12, k22] = k;
    let mean = 0.5 * (k11 + k22);
    let radius = (0.5 * (k11 - k22)).hypot(k12);
    let (l1, l2) = (mean + radius, mean - radius);
    if l2 < 0.0 {
        return Err(Error::Domain(format!(
            "stiffness matrix not positive semidefinite (eigenvalue {l2})"
        )));
    }
    let (s1, s2) = (l1.sqrt(), l2.sqrt());
    // sqrt(K) = s2 I + (s1 - s2) P1 with P1 the projector onto the first eigenvector.
    let (m11, m12, m22) = if radius == 0.0 {
        (s1, 0.0, s1)
    } else {
        let c2 = 0.5 * (1.0 + 0.5 * (k11 - k22) / radius);
        let s2c = 0.5 * (1.0 - 0.5 * (k11 - k22) / radius);
        let cs = 0.5 * k12 / radius;
        (s2 + (s1 - s2) * c2, (s1 - s2) * cs, s2 + (s1 - s2) * s2c)
    };
    if m12 == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((2.0 * m11 * m22 / (m12 * m12) - 1.0).max(1.0))
}

/// A Gaussian lobe centered on one stable fixed point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianLobe {
    pub center: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub mode_angle: f64,
    pub ratio: f64,
    pub entropy_bits: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Superposition {
    Coherent,
    Incoherent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedLobe {
    pub lobe: GaussianLobe,
    pub weight: f64,
    /// Macroscopic position in the kept mode.
    pub kept: f64,
    /// Macroscopic position in the traced mode.
    pub traced: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LobeSet {
    pub lobes: Vec<WeightedLobe>,
    pub kind: Superposition,
    /// Whether the lobes' kept-mode projections are mutually orthogonal.
    pub pairwise_orthogonal: bool,
}

impl LobeSet {
    pub fn with_kind(mut self, kind: Superposition) -> Self {
        self.kind = kind;
        self
    }
}

/// Macroscopic projections of a lobe center onto the kept and traced modes.
fn projections(p: &CatastrophePotential, center: &[f64]) -> (f64, f64) {
    match center {
        // y1 = c x1 + s x2 with y2 = 0 in the lobe center: x1 = c y1, x2 = s y1.
        [y] => {
            let half = 0.5 * p.theta();
            (half.cos() * y, half.sin() * y)
        }
        [y1, y2] => (*y1, *y2),
        _ => unreachable!(),
    }
}

fn lobe_for(p: &CatastrophePotential, fp: &FixedPoint) -> Result<GaussianLobe> {
    if fp.stability == Stability::Marginal {
        // Critical well: vanishing excitation energy drives the ratio to 1.
        return Ok(GaussianLobe {
            center: fp.location.clone(),
            epsilons: fp.hessian_eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect(),
            mode_angle: fp.normal_mode_angle.unwrap_or(0.5 * p.theta()),
            ratio: 1.0,
            entropy_bits: f64::INFINITY,
        });
    }
    let (ratio, mode_angle) = match p.model() {
        Model::Cusp | Model::Butterfly => (
            ratio_general_theta(fp.excitation_energies[0], p.theta())?,
            0.5 * p.theta(),
        ),
        Model::Molar => {
            let h = p.hessian(&fp.location)?;
            (
                ratio_from_stiffness([h[0], h[1], h[3]])?,
                fp.normal_mode_angle.unwrap_or(0.0),
            )
        }
    };
    Ok(GaussianLobe {
        center: fp.location.clone(),
        epsilons: fp.excitation_energies.clone(),
        mode_angle,
        ratio,
        entropy_bits: entropy_from_ratio(ratio)?,
    })
}

/// Picks the wells of minimal bottom energy and weights them equally.
pub fn select_ground_lobes(p: &CatastrophePotential, fps: &[FixedPoint]) -> Result<LobeSet> {
    let candidates: Vec<&FixedPoint> = fps.iter().filter(|f| f.stability != Stability::Unstable).collect();
    if candidates.is_empty() {
        return Err(Error::NoStablePoint);
    }
    let v_min = candidates.iter().map(|f| f.well_energy).fold(f64::INFINITY, f64::min);
    let chosen: Vec<&FixedPoint> = candidates
        .into_iter()
        .filter(|f| f.well_energy - v_min <= DEGENERACY_RTOL * v_min.abs().max(1.0))
        .collect();
    let weight = 1.0 / chosen.len() as f64;
    let mut lobes = Vec::with_capacity(chosen.len());
    for fp in chosen {
        let (kept, traced) = projections(p, &fp.location);
        lobes.push(WeightedLobe {
            lobe: lobe_for(p, fp)?,
            weight,
            kept,
            traced,
        });
    }
    let pairwise_orthogonal = distinct_kept(&lobes);
    Ok(LobeSet {
        lobes,
        kind: Superposition::Coherent,
        pairwise_orthogonal,
    })
}

fn same_point(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

fn distinct_kept(lobes: &[WeightedLobe]) -> bool {
    lobes
        .iter()
        .enumerate()
        .all(|(i, a)| lobes[i + 1..].iter().all(|b| !same_point(a.kept, b.kept)))
}

/// Groups positions into macroscopically distinct classes.
fn class_index(values: &[f64]) -> Vec<usize> {
    let mut reps: Vec<f64> = Vec::new();
    values
        .iter()
        .map(|&v| match reps.iter().position(|&r| same_point(r, v)) {
            Some(i) => i,
            None => {
                reps.push(v);
                reps.len() - 1
            }
        })
        .collect()
}

/// Entropy of the reduced state of a multi-lobe ground state.
///
/// Lobes are treated as macroscopic states: kept-mode projections at distinct
/// points are orthogonal, coincident ones identical. The mixing part is the
/// entropy of the resulting macroscopic reduced matrix; each lobe then adds
/// its own Gaussian entropy with its weight.
pub fn combine_lobe_entropy(ls: &LobeSet) -> Result<f64> {
    if ls.lobes.is_empty() {
        return Err(Error::NoStablePoint);
    }
    let total: f64 = ls.lobes.iter().map(|l| l.weight).sum();
    if ls.lobes.iter().any(|l| !(l.weight > 0.0)) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::Contract(format!(
            "lobe weights must be positive and sum to 1 (sum = {total})"
        )));
    }
    if distinct_kept(&ls.lobes) != ls.pairwise_orthogonal {
        return Err(Error::Contract(
            "pairwise_orthogonal flag disagrees with the lobe geometry".into(),
        ));
    }
    let local: f64 = ls.lobes.iter().map(|l| l.weight * l.lobe.entropy_bits).sum();
    if local.is_infinite() {
        return Ok(f64::INFINITY);
    }

    let kept_class = class_index(&ls.lobes.iter().map(|l| l.kept).collect::<Vec<_>>());
    let traced_class = class_index(&ls.lobes.iter().map(|l| l.traced).collect::<Vec<_>>());
    let dim = kept_class.iter().max().map_or(0, |m| m + 1);
    let mut rho = DMatrix::<f64>::zeros(dim, dim);
    match ls.kind {
        Superposition::Incoherent => {
            for (l, &k) in ls.lobes.iter().zip(&kept_class) {
                rho[(k, k)] += l.weight;
            }
        }
        Superposition::Coherent => {
            let mut by_traced: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
            for ((l, &k), &t) in ls.lobes.iter().zip(&kept_class).zip(&traced_class) {
                by_traced.entry(t).or_insert_with(|| vec![0.0; dim])[k] += l.weight.sqrt();
            }
            for v in by_traced.values() {
                let v = nalgebra::DVector::from_column_slice(v);
                rho += &v * v.transpose();
            }
        }
    }
    let mixing: f64 = rho
        .symmetric_eigenvalues()
        .iter()
        .filter(|&&p| p > 1e-15)
        .map(|&p| -p * p.log2())
        .sum();
    Ok(mixing.max(0.0) + local)
}

/// Full macroscopic-limit pipeline: fixed points, ground lobes, combination.
pub fn asymptotic_entropy(p: &CatastrophePotential) -> Result<f64> {
    let fps = find_fixed_points(p)?;
    let lobes = select_ground_lobes(p, &fps)?;
    combine_lobe_entropy(&lobes)
}
