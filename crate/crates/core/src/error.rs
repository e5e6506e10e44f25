use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quaternion is not of unit norm (|q| = {norm})")]
    NotUnit { norm: f64 },

    #[error("matrix is not special orthogonal (orthogonality defect {defect:.3e}, det {det})")]
    NotSpecialOrthogonal { defect: f64, det: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("ambiguous Bruhat cell: column {column} has a candidate pivot {value:.3e} inside the ambiguity band")]
    AmbiguousCell { column: usize, value: f64 },

    #[error("path lifting failed: consecutive lifts {jump:.3e} apart with {samples} samples")]
    LiftJump { samples: usize, jump: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("curve is not generic at t = {t}")]
    NonGeneric { t: f64 },

    #[error("non-positive geodesic curvature {kappa} at t = {t}")]
    NonPositiveCurvature { t: f64, kappa: f64 },

    #[error("condition ({condition}) violated at t = {t}")]
    ConditionViolated { condition: &'static str, t: f64 },

    #[error("construction failed: {reason} (residual {residual:.3e})")]
    Construction { reason: String, residual: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),
}

pub type Result<T> = std::result::Result<T, Error>;
