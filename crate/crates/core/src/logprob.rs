//! Probabilities carried as natural logarithms.

use std::fmt;

/// How a log-probability was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Poisson-mixture summation of the non-central chi-squared law.
    Oracle,
    /// Single integral along the steepest-descent path.
    Integral,
    /// Uniform asymptotic series truncated after `terms` contributions.
    Series { terms: usize },
    /// One- or two-term closed form.
    ClosedForm { order: usize },
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Oracle => write!(f, "oracle"),
            Method::Integral => write!(f, "integral"),
            Method::Series { terms } => write!(f, "series-{terms}"),
            Method::ClosedForm { order } => write!(f, "closed{order}"),
        }
    }
}

/// A probability stored as its natural logarithm.
///
/// `bracket`, when present, is a certified `(log_lower, log_upper)` pair
/// enclosing the true value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogProb {
    pub log_value: f64,
    pub method: Method,
    pub bracket: Option<(f64, f64)>,
}

impl LogProb {
    pub fn new(log_value: f64, method: Method) -> Self {
        debug_assert!(!(log_value > 1e-12), "log-probability {log_value} exceeds 0");
        LogProb {
            log_value: log_value.min(0.0),
            method,
            bracket: None,
        }
    }

    /// Attaches a certified bracket; the stored value is clamped into it.
    pub fn with_bracket(mut self, log_lower: f64, log_upper: f64) -> Self {
        let (lo, hi) = if log_lower <= log_upper {
            (log_lower, log_upper)
        } else {
            (log_upper, log_lower)
        };
        self.log_value = self.log_value.clamp(lo, hi);
        self.bracket = Some((lo, hi));
        self
    }

    /// Linear-domain value; underflows to zero for deep tails.
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }

    pub fn log10(&self) -> f64 {
        self.log_value * std::f64::consts::LOG10_E
    }

    pub fn log2(&self) -> f64 {
        self.log_value * std::f64::consts::LOG2_E
    }
}

/// Running `ln(sum exp(x_i))` without overflow or underflow.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LogSum {
    max: f64,
    scaled: f64,
}

impl LogSum {
    pub(crate) fn new() -> Self {
        LogSum {
            max: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }

    pub(crate) fn add(&mut self, log_term: f64) {
        if log_term == f64::NEG_INFINITY {
            return;
        }
        if log_term <= self.max {
            self.scaled += (log_term - self.max).exp();
        } else {
            self.scaled = self.scaled * (self.max - log_term).exp() + 1.0;
            self.max = log_term;
        }
    }

    pub(crate) fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.ln()
        }
    }
}
