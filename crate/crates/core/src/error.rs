//! Error type shared by the numerical modules.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumError {
    #[error("quadrature did not converge for {what}: partial value {partial_re}+{partial_im}i, estimate {estimate:e} after {panels} panels")]
    Convergence {
        what: String,
        partial_re: f64,
        partial_im: f64,
        estimate: f64,
        panels: usize,
    },
    #[error("singular integrand: {0}")]
    Singular(String),
    #[error("clearance violated, reroute required: {0}")]
    Clearance(String),
    #[error("continuation step size underflow: {0}")]
    StepUnderflow(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("divisor rejected: {0}")]
    Divisor(String),
    #[error("tracing failed: {0}")]
    Tracing(String),
    #[error("topology error: {0}")]
    Topology(String),
    #[error("basis construction failed: {0}")]
    Basis(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("inconclusive lattice reduction: {0}")]
    Inconclusive(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type NumResult<T> = Result<T, NumError>;
