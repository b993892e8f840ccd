//! Ground-state entanglement of two-mode bosonic catastrophe models.
//!
//! Three potential families are covered: the cusp, the butterfly and the
//! two-dimensional "molar" catastrophe. Entropies are available both in the
//! macroscopic limit, from a Gaussian analysis about the classical fixed
//! points ([`asymptotic`]), and at finite macroscopy parameter `mu` from
//! numerical ground states ([`numerics`]). [`sweep`] drives parameter scans,
//! peak location and power-law fits; [`io`] renders results as CSV or JSON.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotic;
pub mod config;
pub mod error;
pub mod fixed_points;
pub mod io;
pub mod numerics;
pub mod potential;
pub mod sweep;
pub mod validate;

pub use error::{Error, Result};
pub use potential::{CatastrophePotential, Controls, Model};
