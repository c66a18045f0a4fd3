//! Special functions: Gaussian tail and its asymptotic series, error
//! function, regularized incomplete gamma in log form, and a Poisson-mixture
//! non-central chi-squared oracle.

mod chi2;
mod gamma;
mod gaussian;

pub use chi2::{chi2_noncentral_cdf_oracle, Chi2Tails, ORACLE_TAIL_MASS};
pub use gamma::{ln_gamma_pq, ln_half_gamma_ratio};
pub use gaussian::{
    erf, erf_inv, gaussian_q, gaussian_q_inv, ln_gaussian_q, ln_scaled_q, q_series, scaled_q,
};

/// Where to stop a divergent asymptotic series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    /// Sum exactly this many leading terms.
    Terms(usize),
    /// Stop before the smallest-magnitude term.
    Auto,
}

/// A truncated asymptotic sum together with its first neglected term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub value: f64,
    pub terms_used: usize,
    pub next_term: f64,
}
