use thiserror::Error;

/// Errors raised by the evaluation engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FoxError {
    #[error("gamma pole at {0}")]
    Pole(f64),
    #[error("Bernoulli polynomial degree {0} exceeds the supported maximum of 64")]
    Overflow(usize),
    #[error("invalid parameter set: {0}")]
    InvalidParameters(String),
    #[error("argument {z} outside the convergence domain (radius {radius})")]
    OutsideDomain { z: f64, radius: f64 },
    #[error("coincident numerator poles near s = {0} cannot be isolated")]
    PoleCollision(f64),
    #[error("series did not converge: {0}")]
    NonConvergent(String),
    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("division by a vanishing denominator ({0:e})")]
    Division(f64),
}

pub type Result<T> = std::result::Result<T, FoxError>;
