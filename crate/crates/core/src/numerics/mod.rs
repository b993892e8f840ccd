//! Finite-`mu` numerics: grid and Fock-basis ground states, the two-mode
//! rotation into the bare modes, partial traces and entropies.

pub mod density;
pub mod fock;
pub mod fock_hamiltonian;
pub mod grid;
pub mod lanczos;
pub mod pipeline;
pub mod solve1d;
pub mod solve2d;
pub mod tridiag;

pub use density::{reduced_density_matrix, von_neumann_entropy, ReducedDensityMatrix};
pub use fock::{beam_splitter_rotate, fock_coefficients, TwoModeState};
pub use grid::Grid1D;
pub use pipeline::{
    entropy_at_resolution, finite_mu_entropy, finite_mu_entropy_with, NumericSettings, Refinement, Resolution,
};
pub use solve1d::{solve_1d_ground_state, Harmonic, Potential1D};
