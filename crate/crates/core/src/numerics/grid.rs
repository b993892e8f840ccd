use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform cell-centered grid on `[y_min, y_max]`.
///
/// Points sit at `y_min + (j + 1/2) * spacing`, so a symmetric domain with an
/// even number of points never samples the origin and mirrors exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub y_min: f64,
    pub y_max: f64,
    pub n_points: usize,
    pub spacing: f64,
}

pub const MIN_POINTS: usize = 64;

impl Grid1D {
    pub fn new(y_min: f64, y_max: f64, n_points: usize) -> Result<Self> {
        if n_points < MIN_POINTS {
            return Err(Error::Contract(format!(
                "grid needs at least {MIN_POINTS} points, got {n_points}"
            )));
        }
        if !(y_max > y_min) || !y_min.is_finite() || !y_max.is_finite() {
            return Err(Error::Contract(format!("invalid grid bounds [{y_min}, {y_max}]")));
        }
        Ok(Self {
            y_min,
            y_max,
            n_points,
            spacing: (y_max - y_min) / n_points as f64,
        })
    }

    /// Symmetric grid on `[-half_width, half_width]` with spacing close to `h`
    /// and an even number of points.
    pub fn symmetric(half_width: f64, h: f64) -> Result<Self> {
        let half = ((half_width / h).ceil() as usize).max(MIN_POINTS / 2);
        Self::new(-half_width, half_width, 2 * half)
    }

    pub fn point(&self, j: usize) -> f64 {
        // Offsets from the center are exactly antisymmetric under mirroring.
        let center = 0.5 * (self.y_min + self.y_max);
        center + (j as f64 + 0.5 - 0.5 * self.n_points as f64) * self.spacing
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |j| self.point(j))
    }

    pub fn is_symmetric(&self) -> bool {
        self.n_points.is_multiple_of(2) && (self.y_min + self.y_max).abs() <= 1e-12 * self.y_max.abs()
    }

    /// Same domain with the spacing halved.
    pub fn refined(&self) -> Self {
        Self {
            n_points: 2 * self.n_points,
            spacing: 0.5 * self.spacing,
            ..*self
        }
    }
}
