//! Parameter sweeps, peak location and power-law fits of peak positions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotic::asymptotic_entropy;
use crate::error::{Error, Result};
use crate::numerics::pipeline::natural_half_width;
use crate::numerics::{entropy_at_resolution, finite_mu_entropy_with, NumericSettings};
use crate::potential::{CatastrophePotential, Model};

/// Peak refinement tolerance in the parameter.
pub const PEAK_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Asymptotic,
    Numeric,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Asymptotic => "asymptotic",
            Method::Numeric => "numeric",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub param: f64,
    pub entropy_bits: f64,
    pub method: Method,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub model: Model,
    /// `f64::INFINITY` for asymptotic sweeps.
    pub mu: f64,
    pub param_name: String,
    pub points: Vec<SweepPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamRange {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl ParamRange {
    pub fn new(min: f64, max: f64, steps: usize) -> Result<Self> {
        let r = Self { min, max, steps };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.min.is_finite() || !self.max.is_finite() || !(self.min < self.max) {
            return Err(Error::InvalidParameter {
                key: "range".into(),
                reason: format!("need finite min < max, got [{}, {}]", self.min, self.max),
            });
        }
        if self.steps < 2 {
            return Err(Error::InvalidParameter {
                key: "steps".into(),
                reason: format!("need at least 2 steps, got {}", self.steps),
            });
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let d = (self.max - self.min) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.max
                } else {
                    self.min + d * i as f64
                }
            })
            .collect()
    }
}

fn point_error(param: &str, value: f64, e: Error) -> Error {
    Error::SweepPoint {
        param: param.to_string(),
        value,
        source: Box::new(e),
    }
}

/// Entropy of `template` with `param` set to each grid value. `mu = inf`
/// evaluates the macroscopic limit; otherwise the finite-`mu` solver runs
/// at that `mu`. Points are evaluated in parallel and returned in order.
pub fn sweep_entropy(
    template: &CatastrophePotential,
    param: &str,
    range: ParamRange,
    mu: f64,
    settings: &NumericSettings,
) -> Result<SweepResult> {
    range.validate()?;
    template.param(param)?;
    let method = if mu == f64::INFINITY {
        Method::Asymptotic
    } else {
        Method::Numeric
    };
    let base = match method {
        Method::Asymptotic => *template,
        Method::Numeric => template.with_mu(mu)?,
    };
    let results: Vec<Result<SweepPoint>> = range
        .values()
        .into_par_iter()
        .map(|v| {
            let p = base.with_param(param, v).map_err(|e| point_error(param, v, e))?;
            let s = match method {
                Method::Asymptotic => asymptotic_entropy(&p),
                Method::Numeric => finite_mu_entropy_with(&p, settings).map(|r| r.entropy),
            }
            .map_err(|e| point_error(param, v, e))?;
            Ok(SweepPoint {
                param: v,
                entropy_bits: s,
                method,
            })
        })
        .collect();
    let points = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        model: template.model(),
        mu,
        param_name: param.to_string(),
        points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub param: f64,
    pub entropy_bits: f64,
}

fn check_peak_input(sr: &SweepResult) -> Result<()> {
    let pts = &sr.points;
    if pts.len() < 5 {
        return Err(Error::Contract(format!(
            "peak location needs at least 5 points, got {}",
            pts.len()
        )));
    }
    if pts.iter().any(|p| !p.entropy_bits.is_finite()) {
        return Err(Error::Contract(
            "peak location needs a sweep without infinite entropies".into(),
        ));
    }
    Ok(())
}

fn global_argmax(sr: &SweepResult) -> usize {
    let pts = &sr.points;
    (0..pts.len())
        .max_by(|&a, &b| pts[a].entropy_bits.total_cmp(&pts[b].entropy_bits))
        .expect("nonempty")
}

/// Index of the coarse sample the golden-section stage brackets: the global
/// argmax, or with an `anchor` the interior local maximum nearest to it.
fn coarse_peak(sr: &SweepResult, anchor: Option<f64>) -> Result<usize> {
    check_peak_input(sr)?;
    let pts = &sr.points;
    let i = match anchor {
        None => global_argmax(sr),
        Some(x) => (1..pts.len() - 1)
            .filter(|&i| {
                let s = pts[i].entropy_bits;
                s >= pts[i - 1].entropy_bits && s >= pts[i + 1].entropy_bits
            })
            .min_by(|&a, &b| (pts[a].param - x).abs().total_cmp(&(pts[b].param - x).abs()))
            .unwrap_or_else(|| global_argmax(sr)),
    };
    if i == 0 || i + 1 == pts.len() {
        return Err(Error::PeakNotBracketed(pts[i].param));
    }
    Ok(i)
}

/// Coarse argmax over the sweep, then golden-section search on fresh
/// evaluations of `eval` inside the neighbouring samples.
pub fn locate_peak<F>(sr: &SweepResult, eval: F) -> Result<Peak>
where
    F: Fn(f64) -> Result<f64>,
{
    locate_peak_near(sr, None, eval)
}

/// Like [`locate_peak`], but with `anchor` set the bracket is taken around
/// the interior local maximum closest to `anchor`. Scaling studies use the
/// critical value as anchor, since away from it the entropy may rise again
/// toward the ends of the window.
pub fn locate_peak_near<F>(sr: &SweepResult, anchor: Option<f64>, eval: F) -> Result<Peak>
where
    F: Fn(f64) -> Result<f64>,
{
    let i = coarse_peak(sr, anchor)?;
    let pts = &sr.points;
    golden_section_max(&eval, pts[i - 1].param, pts[i + 1].param, PEAK_TOL)
}

/// Maximizes a unimodal function on `[lo, hi]` to within `tol`.
pub fn golden_section_max<F>(f: &F, mut lo: f64, mut hi: f64, tol: f64) -> Result<Peak>
where
    F: Fn(f64) -> Result<f64>,
{
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > tol {
        if f1 > f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2)?;
        }
    }
    let x = 0.5 * (lo + hi);
    Ok(Peak {
        param: x,
        entropy_bits: f(x)?,
    })
}

/// Peak of a finite-`mu` sweep. The golden-section stage reuses the finest
/// resolution the adaptive solver chose at the coarse maximum, on a domain
/// wide enough for the whole bracket, so the objective is smooth.
pub fn locate_peak_numeric(
    template: &CatastrophePotential,
    sr: &SweepResult,
    anchor: Option<f64>,
    settings: &NumericSettings,
) -> Result<Peak> {
    if !sr.mu.is_finite() {
        return Err(Error::Contract("numeric peak location needs a finite-mu sweep".into()));
    }
    let base = template.with_mu(sr.mu)?;
    let param = sr.param_name.as_str();
    let best = &sr.points[coarse_peak(sr, anchor)?];
    let at_best = base.with_param(param, best.param)?;
    let resolution = finite_mu_entropy_with(&at_best, settings)?.resolution;
    let mut min_half_width = 0.0f64;
    for pt in &sr.points {
        min_half_width = min_half_width.max(natural_half_width(&base.with_param(param, pt.param)?)?);
    }
    locate_peak_near(sr, anchor, |v| {
        let p = base.with_param(param, v)?;
        entropy_at_resolution(&p, resolution, min_half_width, settings)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitForm {
    /// `x* = c0 mu^(-c1)`
    Plain,
    /// `x* - x_c = c0 mu^(-c1)`
    Offset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub form: FitForm,
    pub c0: f64,
    pub c1: f64,
    /// Root-mean-square residual of `ln|x* - x_c|`.
    pub residual_rms: f64,
    pub mu_values: Vec<f64>,
}

impl PowerLawFit {
    /// Slope of `ln|x* - x_c|` against `ln mu`.
    pub fn slope(&self) -> f64 {
        -self.c1
    }

    pub fn predict(&self, mu: f64) -> f64 {
        self.c0 * mu.powf(-self.c1)
    }
}

/// Least squares on `(ln mu, ln|x* - x_c|)`; the common sign of
/// `x* - x_c` is carried by `c0`. `x_c` is ignored for the plain form.
pub fn fit_power_law(points: &[(f64, f64)], form: FitForm, x_c: f64) -> Result<PowerLawFit> {
    if points.len() < 3 {
        return Err(Error::Contract(format!(
            "power-law fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    let x_c = match form {
        FitForm::Plain => 0.0,
        FitForm::Offset => x_c,
    };
    let mut sign = 0.0;
    let mut xs = Vec::with_capacity(points.len());
    let mut ys = Vec::with_capacity(points.len());
    for &(mu, x) in points {
        if !(mu > 0.0) || !mu.is_finite() || !x.is_finite() {
            return Err(Error::Domain(format!("fit point ({mu}, {x}) is not admissible")));
        }
        let d = x - x_c;
        if d == 0.0 {
            return Err(Error::Domain(format!("x* equals x_c at mu = {mu}")));
        }
        if sign != 0.0 && d.signum() != sign {
            return Err(Error::NonMonotoneApproach);
        }
        sign = d.signum();
        xs.push(mu.ln());
        ys.push(d.abs().ln());
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("all mu values coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual_rms = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(PowerLawFit {
        form,
        c0: sign * intercept.exp(),
        c1: -slope,
        residual_rms,
        mu_values: points.iter().map(|p| p.0).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakRecord {
    pub mu: f64,
    pub param_star: f64,
    pub entropy_star: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingStudy {
    pub model: Model,
    pub param_name: String,
    pub peaks: Vec<PeakRecord>,
    pub fit: PowerLawFit,
}

/// Sweeps and peak location at each `mu`, then a power-law fit of the
/// peak positions.
pub fn scaling_study(
    template: &CatastrophePotential,
    param: &str,
    range: ParamRange,
    mu_list: &[f64],
    form: FitForm,
    x_c: f64,
    settings: &NumericSettings,
) -> Result<ScalingStudy> {
    let mut peaks = Vec::with_capacity(mu_list.len());
    for &mu in mu_list {
        let sr = sweep_entropy(template, param, range, mu, settings)?;
        let pk = locate_peak_numeric(template, &sr, Some(x_c), settings)?;
        log::info!("mu={mu}: {param}* = {:.6}, S* = {:.6}", pk.param, pk.entropy_bits);
        peaks.push(PeakRecord {
            mu,
            param_star: pk.param,
            entropy_star: pk.entropy_bits,
        });
    }
    let pts: Vec<(f64, f64)> = peaks.iter().map(|p| (p.mu, p.param_star)).collect();
    let fit = fit_power_law(&pts, form, x_c)?;
    Ok(ScalingStudy {
        model: template.model(),
        param_name: param.to_string(),
        peaks,
        fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(center: f64) -> SweepResult {
        let points = ParamRange::new(-1.0, 1.0, 21)
            .unwrap()
            .values()
            .into_iter()
            .map(|x| SweepPoint {
                param: x,
                entropy_bits: 1.0 / (1.0 + (x - center).powi(2)),
                method: Method::Numeric,
            })
            .collect();
        SweepResult {
            model: Model::Cusp,
            mu: 40.0,
            param_name: "A".into(),
            points,
        }
    }

    #[test]
    fn synthetic_peak() {
        let sr = synthetic(0.3);
        let pk = locate_peak(&sr, |x| Ok(1.0 / (1.0 + (x - 0.3f64).powi(2)))).unwrap();
        assert!((pk.param - 0.3).abs() < 1e-4);
        assert!((pk.entropy_bits - 1.0).abs() < 1e-8);
    }

    #[test]
    fn boundary_peak_rejected() {
        let sr = synthetic(1.5);
        assert!(matches!(locate_peak(&sr, |_| Ok(0.0)), Err(Error::PeakNotBracketed(_))));
    }

    #[test]
    fn anchored_peak_picks_nearest_local_maximum() {
        let mut sr = synthetic(0.0);
        for p in &mut sr.points {
            let x = p.param;
            // Rising toward the left end, local bump at 0.6.
            p.entropy_bits = 1.0 - x + 0.8 * (-(x - 0.6f64).powi(2) / 0.01).exp();
        }
        let f = |x: f64| Ok(1.0 - x + 0.8 * (-(x - 0.6f64).powi(2) / 0.01).exp());
        assert!(matches!(locate_peak(&sr, f), Err(Error::PeakNotBracketed(_))));
        let pk = locate_peak_near(&sr, Some(1.0), f).unwrap();
        // Maximum of 1 - x + 0.8 exp(-(x-0.6)^2/0.01): 1.6 (x-0.6) exp(..)/0.01 = -1.
        let g = |x: f64| -160.0 * (x - 0.6) * (-(x - 0.6f64).powi(2) / 0.01).exp() - 1.0;
        let (mut lo, mut hi) = (0.55, 0.6);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((pk.param - lo).abs() < 2e-4, "{} vs {lo}", pk.param);
    }

    #[test]
    fn exact_power_law() {
        let pts: Vec<(f64, f64)> = [2.0, 5.0, 11.0, 30.0]
            .iter()
            .map(|&m: &f64| (m, 2.0 * m.powf(-1.5)))
            .collect();
        let fit = fit_power_law(&pts, FitForm::Plain, 0.0).unwrap();
        assert!((fit.c0 - 2.0).abs() < 1e-10);
        assert!((fit.c1 - 1.5).abs() < 1e-10);
        assert!(fit.residual_rms < 1e-12);
    }

    #[test]
    fn offset_fit_carries_sign() {
        let pts: Vec<(f64, f64)> = [5.0, 7.0, 10.0, 20.0]
            .iter()
            .map(|&m: &f64| (m, 1.0 - 3.55 * m.powf(-1.9)))
            .collect();
        let fit = fit_power_law(&pts, FitForm::Offset, 1.0).unwrap();
        assert!((fit.c0 + 3.55).abs() < 1e-9);
        assert!((fit.c1 - 1.9).abs() < 1e-9);
    }

    #[test]
    fn mixed_signs_rejected() {
        let pts = [(1.0, 0.5), (2.0, 1.5), (3.0, 0.9)];
        assert_eq!(
            fit_power_law(&pts, FitForm::Offset, 1.0),
            Err(Error::NonMonotoneApproach)
        );
        assert!(fit_power_law(&pts[..2], FitForm::Plain, 0.0).is_err());
    }

    #[test]
    fn asymptotic_sweeps() {
        let s = NumericSettings::default();
        let cusp = CatastrophePotential::cusp(1.0, 1.0).unwrap();
        let sr = sweep_entropy(&cusp, "A", ParamRange::new(-2.0, 2.0, 5).unwrap(), f64::INFINITY, &s).unwrap();
        assert_eq!(sr.points[2].entropy_bits, f64::INFINITY);
        assert!(sr.points[0].entropy_bits > 1.0 && sr.points[4].entropy_bits < 0.2);
        assert!(sr.points.iter().all(|p| p.method == Method::Asymptotic));

        let molar = CatastrophePotential::molar(-1.0, 2.0, 1.0).unwrap();
        let sr = sweep_entropy(
            &molar,
            "gamma",
            ParamRange::new(1.1, 3.0, 12).unwrap(),
            f64::INFINITY,
            &s,
        )
        .unwrap();
        assert!(sr.points.iter().all(|p| p.entropy_bits == 1.0));

        let bf = CatastrophePotential::butterfly(1.0, crate::potential::butterfly_default_a4(), 1.0).unwrap();
        let sr = sweep_entropy(&bf, "A2", ParamRange::new(1.01, 1.3, 8).unwrap(), f64::INFINITY, &s).unwrap();
        // Single central well with eps = sqrt(A2): zero just above the
        // crossing, growing only slowly.
        assert!(sr.points[0].entropy_bits < 1e-4);
        assert!(sr.points.iter().all(|p| p.entropy_bits < 0.02));
    }

    #[test]
    fn failing_point_names_value() {
        let s = NumericSettings::default();
        let molar = CatastrophePotential::molar(-1.0, 2.0, 1.0).unwrap();
        let err = sweep_entropy(
            &molar,
            "gamma",
            ParamRange::new(-3.0, -1.5, 3).unwrap(),
            f64::INFINITY,
            &s,
        )
        .unwrap_err();
        match err {
            Error::SweepPoint { param, value, .. } => {
                assert_eq!(param, "gamma");
                assert_eq!(value, -3.0);
            }
            e => panic!("{e:?}"),
        }
    }
}
