use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("path half-width must be at least 1, got {0}")]
    InvalidHalfWidth(usize),
    #[error("non-positive strength {strength} at site {site}")]
    NonPositiveStrength { site: i64, strength: f64 },
    #[error("duplicate site {0}")]
    DuplicateSite(i64),
    #[error("potential is empty")]
    EmptyPotential,
    #[error("site {site} lies outside the vertex range -{k}..={k}")]
    SiteOutOfRange { site: i64, k: usize },
    #[error("side sub-path is empty (k = {k}, r_min = {r_min}, r_max = {r_max})")]
    EmptySidePath { k: usize, r_min: i64, r_max: i64 },
    #[error("vector has length {got}, operator has size {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("zero vector")]
    ZeroVector,
    #[error("eigenvalue index {index} out of range for size {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("inverse iteration did not converge after {sweeps} sweeps (last residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },
    #[error("positivity violated: ground state entry {value:e} at site {site}")]
    PositivityViolated { site: i64, value: f64 },
    #[error("Dirichlet half-path size must be at least 1, got {0}")]
    InvalidDirichletSize(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("degenerate trial state: (2k+1)·ĉ² = {0} is not below 1")]
    DegenerateTrialState(f64),
    #[error("trial state norm² deviates from 1 by {0:e}")]
    Normalization(f64),
    #[error("need at least {need} usable points, got {got}")]
    InsufficientPoints { need: usize, got: usize },
    #[error("degenerate samples: {0}")]
    DegenerateSamples(String),
    #[error("sweep failed at k = {k}: {source}")]
    Sweep { k: usize, source: Box<Error> },
    #[error("{0}")]
    Parse(String),
}

impl Error {
    /// True for failures of the iterative numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NoConvergence { .. } | Error::PositivityViolated { .. } | Error::Normalization(_) => true,
            Error::Sweep { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
