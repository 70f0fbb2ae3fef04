use thiserror::Error;

use crate::optimize::Param;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("squeezing magnitude must be finite and non-negative, got {0}")]
    InvalidSqueezing(f64),

    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error("transform is not symplectic (max |S Omega S^T - Omega| = {deviation:e})")]
    NotSymplectic { deviation: f64 },

    #[error("invalid covariance matrix: {0}")]
    InvalidCovariance(String),

    #[error("one-mode covariance determinant {det} is below the uncertainty bound")]
    Unphysical { det: f64 },

    #[error("symplectic eigenvalue must be >= 1, got {0}")]
    InvalidDelta(f64),

    #[error("Fock cutoff must be at least 1, got {0}")]
    InvalidCutoff(usize),

    #[error("truncation budget {budget:e} exceeds the limit {limit:e}; raise the cutoff")]
    TruncationExceeded { budget: f64, limit: f64 },

    #[error("density matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("unknown parameter `{0}` (expected one of r_a, r_b, theta, phi0, phi1, chi_a, chi_b)")]
    UnknownParameter(String),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("at least one free parameter is required")]
    NoFreeParameters,

    #[error(
        "parameter {0} cannot be optimized (only angles are free; squeezing is a fixed input)"
    )]
    NotOptimizable(Param),

    #[error("at most {max} free parameters are supported, got {got}")]
    TooManyFreeParameters { max: usize, got: usize },
}
