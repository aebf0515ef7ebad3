use thiserror::Error;

use crate::geometry::ValidationReport;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("no sign change on [{a}, {b}]: f(a) = {fa:e}, f(b) = {fb:e}")]
    Bracket { a: f64, b: f64, fa: f64, fb: f64 },

    #[error("non-finite function value {value} at x = {x}")]
    Evaluation { x: f64, value: f64 },

    #[error("matrix is not Hermitian: defect {defect:e} exceeds {tol:e}")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("parameter outside branch domain: {0}")]
    BranchDomain(String),

    #[error("geometry failed validation: {0}")]
    Geometry(ValidationReport),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("negative-eigenvalue count not converged: {0}")]
    Resolution(String),

    #[error("basis truncation not converged: {0}")]
    Truncation(String),

    #[error("assembly failed: {0}")]
    Assembly(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl Error {
    /// True for failures caused by an under-resolved discretization rather than bad input.
    pub fn is_nonconvergence(&self) -> bool {
        matches!(self, Error::Resolution(_) | Error::Truncation(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
