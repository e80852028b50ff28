use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown function `{0}`")]
    UnknownFunction(String),

    #[error("function `{0}` has unknown curvature; pass an explicit concavity override")]
    CurvatureUnknown(String),

    #[error("interval [{lo}, {hi}] is not inside the domain of `{function}`")]
    DomainViolation { function: String, lo: f64, hi: f64 },

    #[error("invalid interval [{lo}, {hi}]: need finite lo < hi")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("deviation {deviation:e} at x = {x} contradicts the curvature tag of `{function}`")]
    NonConcaveDetected { function: String, x: f64, deviation: f64 },

    #[error("`{function}` is not strictly concave on [{lo}, {hi}]: the chord gap has no unique maximum")]
    NotStrictlyConcave { function: String, lo: f64, hi: f64 },

    #[error("inner search did not converge; best bracket [{lo}, {hi}]")]
    NoConvergence { lo: f64, hi: f64 },

    #[error("need at least 2 breakpoints, got {0}")]
    InvalidCount(usize),

    #[error("invalid breakpoints: {0}")]
    InvalidExplicit(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("breakpoint {index} collapsed onto a neighbour (x = {x})")]
    NumericalCollapse { index: usize, x: f64 },

    #[error("update of breakpoint {index} failed: {source}")]
    SweepFailed {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("no convergence after {sweeps} sweeps (last movement {movement:e})")]
    MaxSweepsExceeded { sweeps: usize, movement: f64 },

    #[error("greedy insertion exceeded {0} insertions")]
    InsertionLimit(usize),

    #[error("oracle budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("result did not converge; export requires the allow-unconverged flag")]
    Unconverged,
}
