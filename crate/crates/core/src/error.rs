use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("points {first} and {second} coincide: {point}")]
    DistinctnessViolation {
        first: usize,
        second: usize,
        point: Complex64,
    },

    #[error("domain violation: {0}")]
    DomainViolation(String),

    #[error("index {index} outside the valid range 0..={max}")]
    IndexViolation { index: usize, max: isize },

    /// The adaptive integrator ran out of refinement budget.
    #[error("quadrature tolerance {tolerance:e} not reached (error bound {error_bound:e})")]
    ToleranceNotMet {
        estimate: Vec<Complex64>,
        error_bound: f64,
        tolerance: f64,
    },

    #[error("ill-conditioned system (condition estimate {condition:e}): {reason}")]
    IllConditioned { condition: f64, reason: String },

    #[error("branch of K(z,0)^(2/p) cannot be continued to z = {z}: {reason}")]
    BranchAmbiguity { z: Complex64, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Short machine-readable tag, used for error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DistinctnessViolation { .. } => "DistinctnessViolation",
            Error::DomainViolation(_) => "DomainViolation",
            Error::IndexViolation { .. } => "IndexViolation",
            Error::ToleranceNotMet { .. } => "ToleranceNotMet",
            Error::IllConditioned { .. } => "IllConditioned",
            Error::BranchAmbiguity { .. } => "BranchAmbiguity",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }

    /// Numerical failures, as opposed to rejected input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ToleranceNotMet { .. } | Error::IllConditioned { .. } | Error::BranchAmbiguity { .. }
        )
    }
}
