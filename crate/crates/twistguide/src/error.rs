use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("degenerate discretization: {0}")]
    DegenerateDiscretization(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    /// `a * ||kappa1|| >= 1`: the tube map stops being an immersion.
    #[error("immersion violated: a * ||kappa1|| = {product} >= 1")]
    ImmersionViolation { product: f64 },

    #[error("frame orthonormality drift {drift:e} exceeds {tolerance:e}")]
    OrthonormalityDrift { drift: f64, tolerance: f64 },

    #[error("degenerate ground state: E2 - E1 = {gap:e}")]
    DegenerateGroundState { gap: f64 },

    #[error("twisting constant vanishes (lambda = {lambda:e}); Hardy bounds unavailable")]
    HardyUnavailable { lambda: f64 },

    #[error("explicit Hardy bound is not positive (c_h = {value:e})")]
    NonPositiveHardyBound { value: f64 },

    #[error("eigensolver did not converge after {iterations} steps (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("matrix is not positive definite (pivot {index})")]
    NotPositiveDefinite { index: usize },

    #[error("invalid `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },
}

impl Error {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { field, reason: reason.into() }
    }
}
