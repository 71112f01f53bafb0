use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole of the Gamma function at {0}")]
    Pole(f64),

    #[error("Gamma({0}) overflows f64")]
    Overflow(f64),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("order is not admissible: {0}")]
    Admissibility(String),

    #[error("invalid expansion parameters: n = {n}, N = {big_n} (need N >= n >= 1)")]
    InvalidParams { n: usize, big_n: usize },

    #[error("quadrature did not reach tolerance {tol:e} within {panels} panels (estimated error {estimate:e})")]
    QuadratureNonConvergence {
        tol: f64,
        panels: usize,
        estimate: f64,
    },

    #[error("derivative of order {order} unavailable: {reason}")]
    DerivativeUnavailable { order: usize, reason: String },

    #[error("missing derivative bound L_{0}")]
    MissingBound(usize),

    #[error("singular evaluation at t = {0}")]
    Singularity(f64),

    #[error("step-size controller failed at t = {t}: {reason}")]
    StepSize { t: f64, reason: String },

    #[error("degenerate time coefficient: {0}")]
    Degenerate(String),

    #[error("invalid grid: {0}")]
    Grid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
