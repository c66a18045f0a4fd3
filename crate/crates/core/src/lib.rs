//! Finite-blocklength converse bounds for the real AWGN channel.
//!
//! The missed-detection and false-alarm probabilities of the hypothesis test
//! behind the converse are non-central chi-squared tails. They are evaluated
//! through a uniform representation `step + g(γ) exp(-n v(γ)/2)`, with `g`
//! computed by quadrature along a steepest-descent path or by its asymptotic
//! series, and cross-checked against a direct Poisson-mixture oracle.

pub mod bounds;
pub mod certify;
pub mod error;
pub mod logprob;
pub mod presets;
pub mod quadrature;
pub mod roots;
pub mod series;
pub mod specfun;
pub mod temme;
pub mod validate;

pub use error::{Error, Result};
pub use logprob::{LogProb, Method};
