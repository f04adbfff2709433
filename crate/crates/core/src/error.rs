use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid moduli: {0}")]
    InvalidModuli(String),

    #[error("invalid cross-section: {0}")]
    InvalidSection(String),

    #[error("unsupported quadrature degree {0} (maximum is 50)")]
    QuadratureDegree(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quadrature budget exceeded: {0}")]
    QuadratureBudget(String),

    #[error("factorization failed at pivot {index} (value {pivot:e})")]
    Factorization { index: usize, pivot: f64 },

    #[error("system is ill-conditioned: condition estimate {estimate:e} exceeds {limit:e}")]
    IllConditioned { estimate: f64, limit: f64 },

    #[error("field representation does not provide second derivatives")]
    MissingSecondDerivatives,

    #[error("incompatible bases: {0}")]
    IncompatibleBasis(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
