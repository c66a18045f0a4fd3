use thiserror::Error;

/// Failures raised by the numerical engine.
///
/// Regimes that are valid but uninteresting (a rate below the one-codeword
/// floor, a certificate that does not hold) are reported through status
/// fields on the results, not through this type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what}: argument {value} is outside the domain")]
    Domain { what: &'static str, value: f64 },

    #[error("threshold gamma = {gamma} is not strictly inside the validity window ({lo}, {hi})")]
    WindowViolation { gamma: f64, lo: f64, hi: f64 },

    #[error("oracle is limited to n <= {max}, got n = {n}")]
    OracleRange { n: u64, max: u64 },

    #[error("series pole: |exp(theta - gamma) - 1| = {distance:e} is below the guard")]
    Pole { distance: f64 },

    #[error("two-term expansion breaks down: g1/n = {ratio} >= 1")]
    OrderTwoBreakdown { ratio: f64 },

    #[error("adaptive quadrature did not converge (estimated relative error {estimate:e})")]
    Quadrature { estimate: f64 },

    #[error("root is not bracketed on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("power series has a zero leading coefficient")]
    ZeroLeading,

    #[error("coefficient table produced a non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("rate bound is below the one-codeword floor 1/n")]
    BelowFloor,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(what: &'static str, value: f64) -> Error {
    Error::Domain { what, value }
}
