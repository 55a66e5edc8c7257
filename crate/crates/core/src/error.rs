//! Error type shared by every module.

use thiserror::Error;

/// Failure modes of the numerical pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecayError {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("operation not available in regime {regime}: {reason}")]
    Regime { regime: String, reason: String },
    #[error("argument outside domain: {0}")]
    Domain(String),
    #[error("step size violation: {0}")]
    StepSize(String),
    #[error("quadrature tolerance not met ({level}): estimated error {estimate:.3e} > {tolerance:.3e}")]
    Quadrature {
        level: String,
        estimate: f64,
        tolerance: f64,
    },
    #[error("step halving did not converge: {0}")]
    NoConvergence(String),
    #[error("norm drift {drift:.3e} exceeds {limit:.1e} at t = {t}")]
    NormDrift { drift: f64, limit: f64, t: f64 },
    #[error("evaluation point is within pole proximity (|F| = {0:.3e})")]
    PoleProximity(f64),
    #[error("evaluation point lies on a branch cut: {0}")]
    BranchCut(String),
    #[error("exceptional point: repeated roots (min separation {0:.3e})")]
    ExceptionalPoint(f64),
    #[error("root polish failed: residual {residual:.3e} > {limit:.3e}")]
    RootPolish { residual: f64, limit: f64 },
    #[error("ambiguous sheet assignment for root {0}")]
    AmbiguousSheet(String),
    #[error("no bracket found: {0}")]
    Bracket(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("eigensolver failure: {0}")]
    Eigen(String),
}

impl DecayError {
    /// Process exit code class: 2 tolerance breach, 3 configuration error, 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            DecayError::Quadrature { .. }
            | DecayError::NoConvergence(_)
            | DecayError::NormDrift { .. } => 2,
            DecayError::InvalidParam(_)
            | DecayError::Regime { .. }
            | DecayError::Domain(_)
            | DecayError::StepSize(_) => 3,
            _ => 4,
        }
    }

    /// Stable machine-readable tag.
    pub fn code(&self) -> &'static str {
        match self {
            DecayError::InvalidParam(_) => "INVALID_PARAM",
            DecayError::Regime { .. } => "REGIME",
            DecayError::Domain(_) => "DOMAIN",
            DecayError::StepSize(_) => "STEP_SIZE",
            DecayError::Quadrature { .. } => "QUADRATURE_TOLERANCE",
            DecayError::NoConvergence(_) => "NO_CONVERGENCE",
            DecayError::NormDrift { .. } => "NORM_DRIFT",
            DecayError::PoleProximity(_) => "POLE_PROXIMITY",
            DecayError::BranchCut(_) => "BRANCH_CUT",
            DecayError::ExceptionalPoint(_) => "EXCEPTIONAL_POINT",
            DecayError::RootPolish { .. } => "ROOT_POLISH",
            DecayError::AmbiguousSheet(_) => "AMBIGUOUS_SHEET",
            DecayError::Bracket(_) => "BRACKET",
            DecayError::InsufficientData(_) => "INSUFFICIENT_DATA",
            DecayError::Eigen(_) => "EIGEN",
        }
    }
}

pub type Result<T> = std::result::Result<T, DecayError>;
