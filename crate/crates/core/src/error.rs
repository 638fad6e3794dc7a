use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The estimator is undefined for the supplied data.
    #[error("estimation error: {0}")]
    Estimation(String),

    /// Adaptive quadrature did not reach its tolerance.
    #[error(
        "quadrature failed on [{lower}, {upper}]: {reason} (ln numerator ~ {ln_numerator}, ln denominator ~ {ln_denominator})"
    )]
    Quadrature {
        reason: String,
        lower: f64,
        upper: f64,
        /// Log of the (partial) numerator integral.
        ln_numerator: f64,
        ln_denominator: f64,
    },

    /// Relative efficiency against an exact reference fit.
    #[error("degenerate reference: {0}")]
    Degenerate(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn ensure_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("{name} must be finite and > 0, got {value}")))
    }
}
