//! The catastrophe potential family.
//!
//! All potentials are written in rescaled collective coordinates `y`, with
//! the macroscopy parameter `mu` controlling how far the non-quadratic germ
//! is pushed out: fixed points sit at `|y| ~ sqrt(mu)`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Cusp,
    Butterfly,
    Molar,
}

impl Model {
    /// Number of collective coordinates the potential depends on.
    pub fn dimension(self) -> usize {
        match self {
            Model::Cusp | Model::Butterfly => 1,
            Model::Molar => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Model::Cusp => "cusp",
            Model::Butterfly => "butterfly",
            Model::Molar => "molar",
        }
    }

    /// Names of the control parameters accepted by this model.
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Model::Cusp => &["A"],
            Model::Butterfly => &["A2", "A4"],
            Model::Molar => &["A", "gamma"],
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cusp" => Ok(Model::Cusp),
            "butterfly" => Ok(Model::Butterfly),
            "molar" => Ok(Model::Molar),
            other => Err(Error::InvalidParameter {
                key: "model".into(),
                reason: format!("unknown model `{other}`"),
            }),
        }
    }
}

/// Control parameters, one variant per model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Controls {
    Cusp { a: f64 },
    Butterfly { a2: f64, a4: f64 },
    Molar { a: f64, gamma: f64 },
}

/// Quartic coefficient of the butterfly used throughout: `A4 = -4/sqrt(3)`.
pub fn butterfly_default_a4() -> f64 {
    -4.0 / 3f64.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatastrophePotential {
    controls: Controls,
    mu: f64,
    theta: f64,
}

impl CatastrophePotential {
    /// `V = y^4 / (4 mu) + A y^2 / 2`.
    pub fn cusp(a: f64, mu: f64) -> Result<Self> {
        Self::new(Controls::Cusp { a }, mu)
    }

    /// `V = A2 y^2 / 2 + A4 y^4 / (4 mu) + y^6 / (6 mu^2)`.
    pub fn butterfly(a2: f64, a4: f64, mu: f64) -> Result<Self> {
        Self::new(Controls::Butterfly { a2, a4 }, mu)
    }

    /// `V = A (y1^2 + y2^2) / 2 + (y1^4 + 2 gamma y1^2 y2^2 + y2^4) / (4 mu)`.
    pub fn molar(a: f64, gamma: f64, mu: f64) -> Result<Self> {
        Self::new(Controls::Molar { a, gamma }, mu)
    }

    pub fn new(controls: Controls, mu: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::InvalidParameter {
                key: "mu".into(),
                reason: format!("must be a positive finite real, got {mu}"),
            });
        }
        let values: &[f64] = match &controls {
            Controls::Cusp { a } => &[*a],
            Controls::Butterfly { a2, a4 } => &[*a2, *a4],
            Controls::Molar { a, gamma } => &[*a, *gamma],
        };
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                key: "params".into(),
                reason: "control parameters must be finite".into(),
            });
        }
        Ok(Self {
            controls,
            mu,
            theta: FRAC_PI_2,
        })
    }

    /// Sets the collective/bare mixing angle. Only meaningful for 1D models.
    pub fn with_theta(mut self, theta: f64) -> Result<Self> {
        if self.model() == Model::Molar {
            return Err(Error::InvalidParameter {
                key: "theta".into(),
                reason: "the molar model entangles y1 with y2 directly and takes no mixing angle".into(),
            });
        }
        if !theta.is_finite() {
            return Err(Error::InvalidParameter {
                key: "theta".into(),
                reason: "must be finite".into(),
            });
        }
        self.theta = theta;
        Ok(self)
    }

    pub fn with_mu(self, mu: f64) -> Result<Self> {
        let theta = self.theta;
        let mut p = Self::new(self.controls, mu)?;
        p.theta = theta;
        Ok(p)
    }

    pub fn model(&self) -> Model {
        match self.controls {
            Controls::Cusp { .. } => Model::Cusp,
            Controls::Butterfly { .. } => Model::Butterfly,
            Controls::Molar { .. } => Model::Molar,
        }
    }

    pub fn controls(&self) -> Controls {
        self.controls
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Looks up a control parameter by name (`A`, `A2`, `A4`, `gamma`).
    pub fn param(&self, name: &str) -> Result<f64> {
        match (self.controls, name) {
            (Controls::Cusp { a }, "A") => Ok(a),
            (Controls::Butterfly { a2, .. }, "A2") => Ok(a2),
            (Controls::Butterfly { a4, .. }, "A4") => Ok(a4),
            (Controls::Molar { a, .. }, "A") => Ok(a),
            (Controls::Molar { gamma, .. }, "gamma") => Ok(gamma),
            (_, "mu") => Ok(self.mu),
            (_, "theta") if self.model() != Model::Molar => Ok(self.theta),
            _ => Err(self.unknown_param(name)),
        }
    }

    /// Returns a copy with one named parameter replaced.
    pub fn with_param(&self, name: &str, value: f64) -> Result<Self> {
        let controls = match (self.controls, name) {
            (Controls::Cusp { .. }, "A") => Controls::Cusp { a: value },
            (Controls::Butterfly { a4, .. }, "A2") => Controls::Butterfly { a2: value, a4 },
            (Controls::Butterfly { a2, .. }, "A4") => Controls::Butterfly { a2, a4: value },
            (Controls::Molar { gamma, .. }, "A") => Controls::Molar { a: value, gamma },
            (Controls::Molar { a, .. }, "gamma") => Controls::Molar { a, gamma: value },
            (_, "mu") => return self.with_mu(value),
            (_, "theta") => return self.with_theta(value),
            _ => return Err(self.unknown_param(name)),
        };
        let mut p = Self::new(controls, self.mu)?;
        p.theta = self.theta;
        Ok(p)
    }

    fn unknown_param(&self, name: &str) -> Error {
        Error::InvalidParameter {
            key: name.to_string(),
            reason: format!(
                "not a parameter of the {} model (expected one of {:?})",
                self.model(),
                self.model().param_names()
            ),
        }
    }

    /// Evaluates `V(y)`; `y` must have one component per collective coordinate.
    pub fn eval(&self, y: &[f64]) -> Result<f64> {
        self.check_dim(y)?;
        Ok(match y {
            [y1] => self.eval1(*y1),
            [y1, y2] => self.eval2(*y1, *y2),
            _ => unreachable!(),
        })
    }

    pub fn gradient(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(y)?;
        let mu = self.mu;
        Ok(match (self.controls, y) {
            (Controls::Cusp { a }, [y]) => vec![y * y * y / mu + a * y],
            (Controls::Butterfly { a2, a4 }, [y]) => {
                let y2 = y * y;
                vec![y * (a2 + a4 * y2 / mu + y2 * y2 / (mu * mu))]
            }
            (Controls::Molar { a, gamma }, [y1, y2]) => {
                let (s1, s2) = (y1 * y1, y2 * y2);
                vec![y1 * (a + (s1 + gamma * s2) / mu), y2 * (a + (gamma * s1 + s2) / mu)]
            }
            _ => unreachable!(),
        })
    }

    /// Row-major Hessian, `d x d`.
    pub fn hessian(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(y)?;
        let mu = self.mu;
        Ok(match (self.controls, y) {
            (Controls::Cusp { a }, [y]) => vec![3.0 * y * y / mu + a],
            (Controls::Butterfly { a2, a4 }, [y]) => {
                let y2 = y * y;
                vec![a2 + 3.0 * a4 * y2 / mu + 5.0 * y2 * y2 / (mu * mu)]
            }
            (Controls::Molar { a, gamma }, [y1, y2]) => {
                let (s1, s2) = (y1 * y1, y2 * y2);
                let h11 = a + (3.0 * s1 + gamma * s2) / mu;
                let h22 = a + (gamma * s1 + 3.0 * s2) / mu;
                let h12 = 2.0 * gamma * y1 * y2 / mu;
                vec![h11, h12, h12, h22]
            }
            _ => unreachable!(),
        })
    }

    fn check_dim(&self, y: &[f64]) -> Result<()> {
        let d = self.model().dimension();
        if y.len() != d {
            return Err(Error::Contract(format!(
                "{} potential takes {d} coordinate(s), got {}",
                self.model(),
                y.len()
            )));
        }
        Ok(())
    }

    /// Fast path for the 1D models. Returns NaN for the molar model.
    pub(crate) fn eval1(&self, y: f64) -> f64 {
        let mu = self.mu;
        let y2 = y * y;
        match self.controls {
            Controls::Cusp { a } => y2 * y2 / (4.0 * mu) + 0.5 * a * y2,
            Controls::Butterfly { a2, a4 } => {
                0.5 * a2 * y2 + a4 * y2 * y2 / (4.0 * mu) + y2 * y2 * y2 / (6.0 * mu * mu)
            }
            Controls::Molar { .. } => f64::NAN,
        }
    }

    /// Fast path for the molar model. Returns NaN for the 1D models.
    pub(crate) fn eval2(&self, y1: f64, y2: f64) -> f64 {
        match self.controls {
            Controls::Molar { a, gamma } => {
                let (s1, s2) = (y1 * y1, y2 * y2);
                0.5 * a * (s1 + s2) + (s1 * s1 + 2.0 * gamma * s1 * s2 + s2 * s2) / (4.0 * self.mu)
            }
            _ => f64::NAN,
        }
    }
}

/// True iff the leading even-order germ makes `V` bounded from below.
///
/// Cusp and butterfly always are (positive leading coefficient); the molar
/// quartic form is positive definite iff `gamma > -1`.
pub fn check_bounded_below(p: &CatastrophePotential) -> bool {
    match p.controls() {
        Controls::Cusp { .. } | Controls::Butterfly { .. } => p.mu() > 0.0,
        Controls::Molar { gamma, .. } => p.mu() > 0.0 && gamma > -1.0,
    }
}
