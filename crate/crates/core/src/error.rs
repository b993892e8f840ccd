use thiserror::Error;

/// Errors produced anywhere in the catastrophe pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid parameter `{key}`: {reason}")]
    InvalidParameter { key: String, reason: String },

    #[error("potential is not bounded from below")]
    Unbounded,

    #[error("fixed-point polish did not converge (residual gradient norm {residual:e})")]
    FixedPointNonConvergence { residual: f64 },

    #[error("fixed point at {location:?} is unstable")]
    UnstablePoint { location: Vec<f64> },

    #[error("fixed point at {location:?} is marginal (Hessian eigenvalue {eigenvalue:e})")]
    MarginalPoint { location: Vec<f64>, eigenvalue: f64 },

    #[error("model has no stable fixed point")]
    NoStablePoint,

    #[error("no mixing at theta = {0}: entanglement is trivially zero")]
    NoMixing(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("domain too small: |psi| = {edge_amplitude:e} at the boundary")]
    DomainTooSmall { edge_amplitude: f64 },

    #[error("Fock truncation n_max = {n_max} leaves tail probability {tail:e}; increase n_max")]
    Truncation { n_max: usize, tail: f64 },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    EigenNonConvergence { iterations: usize, residual: f64 },

    #[error("spectral gap {gap:e} below 1e-8: ground state is numerically degenerate")]
    Degenerate { gap: f64 },

    #[error("invalid density matrix: eigenvalue {0:e}")]
    InvalidDensityMatrix(f64),

    #[error("grid of {points} points exceeds the cap of {cap}; use a coarser grid")]
    GridTooLarge { points: usize, cap: usize },

    #[error("refinement did not converge; history {history:?}")]
    RefinementNonConvergence { history: Vec<f64> },

    #[error("sweep failed at {param} = {value}: {source}")]
    SweepPoint {
        param: String,
        value: f64,
        source: Box<Error>,
    },

    #[error("peak not bracketed: maximum at range boundary {0}")]
    PeakNotBracketed(f64),

    #[error("non-monotone approach: x* - x_c changes sign")]
    NonMonotoneApproach,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Contract(_) => "contract",
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::Unbounded => "unbounded",
            Error::FixedPointNonConvergence { .. } => "fixed_point_non_convergence",
            Error::UnstablePoint { .. } => "unstable_point",
            Error::MarginalPoint { .. } => "marginal_point",
            Error::NoStablePoint => "no_stable_point",
            Error::NoMixing(_) => "no_mixing",
            Error::Domain(_) => "domain",
            Error::DomainTooSmall { .. } => "domain_too_small",
            Error::Truncation { .. } => "truncation",
            Error::EigenNonConvergence { .. } => "eigen_non_convergence",
            Error::Degenerate { .. } => "degenerate",
            Error::InvalidDensityMatrix(_) => "invalid_density_matrix",
            Error::GridTooLarge { .. } => "grid_too_large",
            Error::RefinementNonConvergence { .. } => "refinement_non_convergence",
            Error::SweepPoint { .. } => "sweep_point",
            Error::PeakNotBracketed(_) => "peak_not_bracketed",
            Error::NonMonotoneApproach => "non_monotone_approach",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
