use thiserror::Error;

use crate::multi_index::MultiIndex;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("polynomial term {index} has degree above the sequence degree {degree}")]
    DegreeOverflow { index: MultiIndex, degree: u32 },

    #[error("invalid moment sequence: {0}")]
    InvalidSequence(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid flow parameters: {0}")]
    InvalidParams(String),

    #[error("insufficient degree: need {needed}, have {have}")]
    InsufficientDegree { needed: u32, have: u32 },

    #[error("quadrature did not converge: error estimate {estimate:e} above tolerance {tol:e}")]
    QuadratureNonConvergence { estimate: f64, tol: f64 },

    #[error("ode integration failed at t = {t}: {reason}")]
    OdeFailure { t: f64, reason: String },

    #[error("past horizon: t = {t} is below -{horizon}")]
    PastHorizon { t: f64, horizon: f64 },

    #[error("non-positive mass: s_0 = {0}")]
    NonPositiveMass(f64),

    #[error(
        "not interior: Hankel matrix is not positive definite (min eigenvalue {min_eigenvalue:e})"
    )]
    NotInterior { min_eigenvalue: f64 },

    #[error("root bracketing failed: {0}")]
    BracketingFailed(String),

    #[error("no kernel: Hankel matrix is {0}")]
    NoKernel(String),

    #[error("complex kernel roots: {0}")]
    ComplexRoots(String),

    #[error("not a positive measure: weight {weight:e} at atom {atom}")]
    NegativeWeight { atom: f64, weight: f64 },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("recovery residual {residual:e} above gate {gate:e}; state: {state}")]
    ResidualTooLarge {
        residual: f64,
        gate: f64,
        state: String,
    },
}
