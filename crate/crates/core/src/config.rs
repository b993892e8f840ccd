//! Run configuration shared by the command-line front end: a TOML file,
//! optionally overridden field by field.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::NumericSettings;
use crate::potential::{butterfly_default_a4, CatastrophePotential, Controls, Model};
use crate::sweep::{FitForm, ParamRange};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Sweep,
    Asymptote,
    Scaling,
    FixedPoints,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::InvalidParameter {
                key: "format".into(),
                reason: format!("expected csv or json, got `{s}`"),
            }),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeConfig {
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub steps: Option<usize>,
}

/// Every field is optional so that a file and command-line flags can be
/// layered; [`RunConfig::validate`] checks what a command needs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub model: Option<Model>,
    /// Fixed control parameters and `theta`.
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    /// Name of the swept parameter.
    pub param: Option<String>,
    pub mu: Option<f64>,
    pub mu_list: Option<Vec<f64>>,
    #[serde(default)]
    pub range: RangeConfig,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub fit_form: Option<FitForm>,
    pub x_c: Option<f64>,
    pub tolerance: Option<f64>,
    pub skip_slow: Option<bool>,
}

fn invalid(key: &str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        key: key.into(),
        reason: reason.into(),
    }
}

fn finite(key: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(key, format!("must be a finite real, got {v}")))
    }
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if finite(key, v)? > 0.0 {
        Ok(v)
    } else {
        Err(invalid(key, format!("must be positive, got {v}")))
    }
}

/// Parses a comma-separated list of positive reals such as `10,20,40,70`.
pub fn parse_mu_list(s: &str) -> Result<Vec<f64>> {
    let out = s
        .split(',')
        .map(|t| {
            let t = t.trim();
            let v: f64 = t
                .parse()
                .map_err(|_| invalid("mu-list", format!("`{t}` is not a number")))?;
            positive("mu-list", v)
        })
        .collect::<Result<Vec<f64>>>()?;
    if out.is_empty() {
        return Err(invalid("mu-list", "empty list"));
    }
    Ok(out)
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.check_fields()?;
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&s)
    }

    /// Layers `overrides` on top of `self`; set fields in `overrides` win.
    pub fn merge(mut self, overrides: RunConfig) -> RunConfig {
        macro_rules! take {
            ($($f:ident),*) => { $( if overrides.$f.is_some() { self.$f = overrides.$f; } )* };
        }
        take!(command, model, param, mu, mu_list, output, format, fit_form, x_c, tolerance, skip_slow);
        if overrides.range.min.is_some() {
            self.range.min = overrides.range.min;
        }
        if overrides.range.max.is_some() {
            self.range.max = overrides.range.max;
        }
        if overrides.range.steps.is_some() {
            self.range.steps = overrides.range.steps;
        }
        self.params.extend(overrides.params);
        self
    }

    /// Checks that do not depend on which command runs.
    fn check_fields(&self) -> Result<()> {
        for (k, v) in &self.params {
            finite(k, *v)?;
        }
        if let Some(mu) = self.mu {
            positive("mu", mu)?;
        }
        if let Some(list) = &self.mu_list {
            if list.is_empty() {
                return Err(invalid("mu_list", "empty list"));
            }
            for &m in list {
                positive("mu_list", m)?;
            }
        }
        if let Some(v) = self.range.min {
            finite("min", v)?;
        }
        if let Some(v) = self.range.max {
            finite("max", v)?;
        }
        if let Some(v) = self.x_c {
            finite("x_c", v)?;
        }
        if let Some(v) = self.tolerance {
            positive("tolerance", v)?;
        }
        if let (Some(lo), Some(hi)) = (self.range.min, self.range.max) {
            if !(lo < hi) {
                return Err(invalid("min", format!("range min {lo} must be below max {hi}")));
            }
        }
        if let Some(s) = self.range.steps {
            if s < 2 {
                return Err(invalid("steps", format!("need at least 2, got {s}")));
            }
        }
        if self.model == Some(Model::Molar) && self.params.contains_key("theta") {
            return Err(invalid("theta", "the molar model takes no mixing angle"));
        }
        if let Some(model) = self.model {
            for k in self.params.keys() {
                if k != "theta" && !model.param_names().contains(&k.as_str()) {
                    return Err(invalid(k, format!("not a parameter of the {} model", model.name())));
                }
            }
            if let Some(p) = &self.param {
                if !model.param_names().contains(&p.as_str()) && !(p == "theta" && model != Model::Molar) {
                    return Err(invalid(
                        "param",
                        format!("`{p}` is not a parameter of the {} model", model.name()),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn command(&self) -> Result<Command> {
        self.command.ok_or_else(|| invalid("command", "missing"))
    }

    pub fn model(&self) -> Result<Model> {
        self.model.ok_or_else(|| invalid("model", "missing"))
    }

    /// Potential with the configured parameters; unspecified ones take the
    /// figure defaults (`theta = pi/2`, `A4 = -4/sqrt 3`, molar `A = -1`).
    pub fn template(&self) -> Result<CatastrophePotential> {
        self.check_fields()?;
        let model = self.model()?;
        let get = |k: &str, d: f64| self.params.get(k).copied().unwrap_or(d);
        let controls = match model {
            Model::Cusp => Controls::Cusp { a: get("A", 1.0) },
            Model::Butterfly => Controls::Butterfly {
                a2: get("A2", 1.0),
                a4: get("A4", butterfly_default_a4()),
            },
            Model::Molar => Controls::Molar {
                a: get("A", -1.0),
                gamma: get("gamma", 2.0),
            },
        };
        let p = CatastrophePotential::new(controls, self.mu.unwrap_or(1.0))?;
        match self.params.get("theta") {
            Some(&t) => p.with_theta(t),
            None => Ok(p),
        }
    }

    /// Swept parameter, defaulting to the model's first control.
    pub fn swept_param(&self) -> Result<String> {
        let model = self.model()?;
        Ok(match &self.param {
            Some(p) => p.clone(),
            None if model == Model::Molar => "gamma".into(),
            None => model.param_names()[0].into(),
        })
    }

    pub fn param_range(&self) -> Result<ParamRange> {
        let r = &self.range;
        ParamRange::new(
            r.min.ok_or_else(|| invalid("min", "missing"))?,
            r.max.ok_or_else(|| invalid("max", "missing"))?,
            r.steps.ok_or_else(|| invalid("steps", "missing"))?,
        )
    }

    /// Peak-search window used by `scaling` when no range is given: a local
    /// maximum per `mu` near the critical value of the swept parameter.
    pub fn scaling_range(&self) -> Result<ParamRange> {
        let r = &self.range;
        if r.min.is_some() || r.max.is_some() || r.steps.is_some() {
            return self.param_range();
        }
        let (lo, hi, steps) = match (self.model()?, self.swept_param()?.as_str()) {
            (Model::Cusp, "A") => (-0.9, 0.0, 46),
            (Model::Butterfly, "A2") => (0.7, 1.02, 65),
            (Model::Molar, "gamma") => (0.95, 7.95, 71),
            (_, p) => {
                return Err(invalid(
                    "min",
                    format!("no default peak window for `{p}`; give --min/--max/--steps"),
                ))
            }
        };
        ParamRange::new(lo, hi, steps)
    }

    pub fn settings(&self) -> NumericSettings {
        let mut s = NumericSettings::default();
        if let Some(t) = self.tolerance {
            s.tolerance = t;
        }
        s
    }

    /// Default fit: offset from the critical value for the butterfly
    /// (`A2 = 1`) and molar (`gamma = 1`) models, plain for the cusp.
    pub fn fit(&self) -> Result<(FitForm, f64)> {
        let model = self.model()?;
        let form = self.fit_form.unwrap_or(match model {
            Model::Cusp => FitForm::Plain,
            _ => FitForm::Offset,
        });
        let x_c = self.x_c.unwrap_or(match model {
            Model::Cusp => 0.0,
            _ => 1.0,
        });
        Ok((form, x_c))
    }

    /// Full validation for the selected command.
    pub fn validate(&self) -> Result<()> {
        self.check_fields()?;
        match self.command()? {
            Command::Validate => Ok(()),
            Command::FixedPoints => self.template().map(|_| ()),
            Command::Asymptote => {
                self.template()?;
                self.swept_param()?;
                self.param_range().map(|_| ())
            }
            Command::Sweep => {
                self.template()?;
                self.swept_param()?;
                self.mu.ok_or_else(|| invalid("mu", "missing"))?;
                self.param_range().map(|_| ())
            }
            Command::Scaling => {
                self.template()?;
                self.swept_param()?;
                self.scaling_range()?;
                let list = self.mu_list.as_ref().ok_or_else(|| invalid("mu_list", "missing"))?;
                if list.len() < 3 {
                    return Err(invalid("mu_list", "a power-law fit needs at least 3 values"));
                }
                self.fit().map(|_| ())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_file() {
        let cfg = RunConfig::from_toml_str(
            r#"
command = "sweep"
model = "butterfly"
param = "A2"
mu = 20
format = "json"
[params]
A4 = -2.0
[range]
min = 0.5
max = 1.2
steps = 15
"#,
        )
        .unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.mu, Some(20.0));
        assert_eq!(cfg.template().unwrap().param("A4").unwrap(), -2.0);
        assert_eq!(cfg.param_range().unwrap().steps, 15);
    }

    #[test]
    fn molar_theta_rejected_naming_key() {
        let err = RunConfig::from_toml_str("model = \"molar\"\n[params]\ntheta = 1.0\n").unwrap_err();
        match err {
            Error::InvalidParameter { key, .. } => assert_eq!(key, "theta"),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn range_checks() {
        assert!(RunConfig::from_toml_str("[range]\nmin = 2.0\nmax = 1.0\n").is_err());
        assert!(RunConfig::from_toml_str("[range]\nsteps = 1\n").is_err());
        assert!(RunConfig::from_toml_str("mu = -3.0\n").is_err());
        assert!(RunConfig::from_toml_str("mu = nan\n").is_err());
        assert!(RunConfig::from_toml_str("bogus = 1\n").is_err());
        assert!(RunConfig::from_toml_str("model = \"cusp\"\n[params]\ngamma = 1.0\n").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = RunConfig::from_toml_str("model = \"cusp\"\nmu = 10\n[params]\nA = 0.5\n").unwrap();
        let mut flags = RunConfig {
            mu: Some(40.0),
            ..Default::default()
        };
        flags.params.insert("A".into(), -1.0);
        let merged = file.merge(flags);
        assert_eq!(merged.mu, Some(40.0));
        assert_eq!(merged.params["A"], -1.0);
        assert_eq!(merged.model, Some(Model::Cusp));
    }

    #[test]
    fn mu_list() {
        assert_eq!(parse_mu_list("10,20, 40,70").unwrap(), vec![10.0, 20.0, 40.0, 70.0]);
        assert!(parse_mu_list("10,,20").is_err());
        assert!(parse_mu_list("10,-1").is_err());
        assert!(parse_mu_list("inf").is_err());
    }

    #[test]
    fn figure_defaults() {
        let cfg = RunConfig {
            model: Some(Model::Molar),
            ..Default::default()
        };
        let p = cfg.template().unwrap();
        assert_eq!(p.param("A").unwrap(), -1.0);
        let cfg = RunConfig {
            model: Some(Model::Butterfly),
            ..Default::default()
        };
        let p = cfg.template().unwrap();
        assert_eq!(p.param("A4").unwrap(), butterfly_default_a4());
        assert_eq!(p.theta(), std::f64::consts::FRAC_PI_2);
    }
}
