//! CSV and JSON renderings of sweeps, fits and scaling studies.
//!
//! Every float is rounded to 12 significant digits and printed in its
//! shortest round-trip form; infinities are written as `inf` / `-inf`.
//! Parsing then re-serializing reproduces the input bytes.

use std::fmt;
use std::io::Write;
use std::path::Path;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fixed_points::{FixedPoint, Stability};
use crate::potential::Model;
use crate::sweep::{FitForm, Method, PeakRecord, PowerLawFit, ScalingStudy, SweepPoint, SweepResult};

pub const CSV_HEADER: [&str; 6] = ["model", "mu", "param_name", "param", "entropy_bits", "method"];

/// Rounds to 12 significant digits.
pub fn round_sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn fmt_num(x: f64) -> String {
    format!("{:?}", round_sig12(x))
}

fn fmt_mu(x: f64) -> String {
    format!("{}", round_sig12(x))
}

fn parse_num(s: &str, field: &str) -> Result<f64> {
    let v: f64 = match s {
        "inf" => f64::INFINITY,
        "-inf" => f64::NEG_INFINITY,
        _ => s
            .parse()
            .map_err(|_| Error::Parse(format!("field `{field}`: `{s}` is not a number")))?,
    };
    if v.is_nan() || (v.is_infinite() && !s.contains("inf")) {
        return Err(Error::Parse(format!("field `{field}`: `{s}` is not admissible")));
    }
    Ok(v)
}

/// A float that serializes rounded, with string infinities.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Num(f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0 {
            x if x == f64::INFINITY => s.serialize_str("inf"),
            x if x == f64::NEG_INFINITY => s.serialize_str("-inf"),
            x if x.is_nan() => Err(serde::ser::Error::custom("NaN is not serializable")),
            x => s.serialize_f64(round_sig12(x)),
        }
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Num;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Num, E> {
                Ok(Num(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Num, E> {
                Ok(Num(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Num, E> {
                Ok(Num(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Num, E> {
                match v {
                    "inf" => Ok(Num(f64::INFINITY)),
                    "-inf" => Ok(Num(f64::NEG_INFINITY)),
                    _ => Err(E::custom(format!("unexpected string `{v}`"))),
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointRec {
    param: Num,
    entropy_bits: Num,
    method: Method,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepRec {
    model: Model,
    mu: Num,
    param_name: String,
    points: Vec<PointRec>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FitRec {
    form: FitForm,
    c0: Num,
    c1: Num,
    residual_rms: Num,
    mu_values: Vec<Num>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PeakRec {
    mu: Num,
    param_star: Num,
    entropy_star: Num,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScalingRec {
    model: Model,
    param_name: String,
    peaks: Vec<PeakRec>,
    fit: FitRec,
}

#[derive(Serialize)]
struct FixedPointRec {
    location: Vec<Num>,
    stability: Stability,
    hessian_eigenvalues: Vec<Num>,
    excitation_energies: Vec<Num>,
    normal_mode_angle: Option<Num>,
    well_energy: Num,
}

fn nums(v: &[f64]) -> Vec<Num> {
    v.iter().map(|&x| Num(x)).collect()
}

fn fit_rec(f: &PowerLawFit) -> FitRec {
    FitRec {
        form: f.form,
        c0: Num(f.c0),
        c1: Num(f.c1),
        residual_rms: Num(f.residual_rms),
        mu_values: nums(&f.mu_values),
    }
}

fn fit_from(r: FitRec) -> PowerLawFit {
    PowerLawFit {
        form: r.form,
        c0: r.c0.0,
        c1: r.c1.0,
        residual_rms: r.residual_rms.0,
        mu_values: r.mu_values.iter().map(|n| n.0).collect(),
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn from_json<'a, T: Deserialize<'a>>(s: &'a str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
}

fn check_sweep(sr: &SweepResult) -> Result<()> {
    if sr.points.is_empty() {
        return Err(Error::Parse("sweep has no points".into()));
    }
    if sr.mu.is_nan() || sr.mu <= 0.0 {
        return Err(Error::Parse(format!("mu must be positive, got {}", sr.mu)));
    }
    let method = sr.points[0].method;
    for w in sr.points.windows(2) {
        if !(w[0].param < w[1].param) {
            return Err(Error::Parse(
                "points must be sorted by strictly increasing param".into(),
            ));
        }
    }
    for p in &sr.points {
        if p.method != method {
            return Err(Error::Parse("mixed methods within one sweep".into()));
        }
        if !p.param.is_finite() {
            return Err(Error::Parse("param must be finite".into()));
        }
        if !(p.entropy_bits >= 0.0) {
            return Err(Error::Parse(format!("negative entropy {}", p.entropy_bits)));
        }
    }
    Ok(())
}

pub fn sweep_to_csv(sr: &SweepResult) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for p in &sr.points {
        w.write_record([
            sr.model.name().to_string(),
            fmt_mu(sr.mu),
            sr.param_name.clone(),
            fmt_num(p.param),
            fmt_num(p.entropy_bits),
            p.method.name().to_string(),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

pub fn sweep_from_csv(s: &str) -> Result<SweepResult> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(s.as_bytes());
    let headers = r.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    if headers.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::Parse(format!("unexpected header {headers:?}")));
    }
    let mut head: Option<(Model, f64, String)> = None;
    let mut points = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let model: Model = rec[0].parse()?;
        let mu = parse_num(&rec[1], "mu")?;
        let name = rec[2].to_string();
        match &head {
            None => head = Some((model, mu, name)),
            Some((m, u, n)) => {
                if *m != model || u.to_bits() != mu.to_bits() || *n != name {
                    return Err(Error::Parse("model, mu and param_name must agree across rows".into()));
                }
            }
        }
        let method = match &rec[5] {
            "asymptotic" => Method::Asymptotic,
            "numeric" => Method::Numeric,
            other => return Err(Error::Parse(format!("unknown method `{other}`"))),
        };
        points.push(SweepPoint {
            param: parse_num(&rec[3], "param")?,
            entropy_bits: parse_num(&rec[4], "entropy_bits")?,
            method,
        });
    }
    let (model, mu, param_name) = head.ok_or_else(|| Error::Parse("no data rows".into()))?;
    let sr = SweepResult {
        model,
        mu,
        param_name,
        points,
    };
    check_sweep(&sr)?;
    Ok(sr)
}

pub fn sweep_to_json(sr: &SweepResult) -> Result<String> {
    to_json(&SweepRec {
        model: sr.model,
        mu: Num(sr.mu),
        param_name: sr.param_name.clone(),
        points: sr
            .points
            .iter()
            .map(|p| PointRec {
                param: Num(p.param),
                entropy_bits: Num(p.entropy_bits),
                method: p.method,
            })
            .collect(),
    })
}

pub fn sweep_from_json(s: &str) -> Result<SweepResult> {
    let r: SweepRec = from_json(s)?;
    let sr = SweepResult {
        model: r.model,
        mu: r.mu.0,
        param_name: r.param_name,
        points: r
            .points
            .into_iter()
            .map(|p| SweepPoint {
                param: p.param.0,
                entropy_bits: p.entropy_bits.0,
                method: p.method,
            })
            .collect(),
    };
    check_sweep(&sr)?;
    Ok(sr)
}

pub fn fit_to_json(f: &PowerLawFit) -> Result<String> {
    to_json(&fit_rec(f))
}

pub fn fit_from_json(s: &str) -> Result<PowerLawFit> {
    Ok(fit_from(from_json(s)?))
}

pub fn scaling_to_json(st: &ScalingStudy) -> Result<String> {
    to_json(&ScalingRec {
        model: st.model,
        param_name: st.param_name.clone(),
        peaks: st
            .peaks
            .iter()
            .map(|p| PeakRec {
                mu: Num(p.mu),
                param_star: Num(p.param_star),
                entropy_star: Num(p.entropy_star),
            })
            .collect(),
        fit: fit_rec(&st.fit),
    })
}

pub fn scaling_from_json(s: &str) -> Result<ScalingStudy> {
    let r: ScalingRec = from_json(s)?;
    Ok(ScalingStudy {
        model: r.model,
        param_name: r.param_name,
        peaks: r
            .peaks
            .into_iter()
            .map(|p| PeakRecord {
                mu: p.mu.0,
                param_star: p.param_star.0,
                entropy_star: p.entropy_star.0,
            })
            .collect(),
        fit: fit_from(r.fit),
    })
}

pub fn fixed_points_to_json(fps: &[FixedPoint]) -> Result<String> {
    let recs: Vec<FixedPointRec> = fps
        .iter()
        .map(|fp| FixedPointRec {
            location: nums(&fp.location),
            stability: fp.stability,
            hessian_eigenvalues: nums(&fp.hessian_eigenvalues),
            excitation_energies: nums(&fp.excitation_energies),
            normal_mode_angle: fp.normal_mode_angle.map(Num),
            well_energy: Num(fp.well_energy),
        })
        .collect();
    to_json(&recs)
}

/// Writes `contents` to `path`, or to stdout when `path` is `None`.
pub fn write_output(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, contents).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}
