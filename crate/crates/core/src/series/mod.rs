//! Taylor-coefficient pipeline for the uniform expansion of `g(γ)`, the
//! truncated series itself, and the one- and two-term closed forms.

mod closed;
mod reference;
mod tables;

pub use closed::{closed_form_logprob, g0_closed, g1_closed};
pub use reference::{complex_reference, ComplexTables};
pub use tables::{build_coefficients, CoefficientTables, MAX_TERMS, POLE_GUARD};

use num_traits::NumAssign;

use crate::error::{domain, Error, Result};
use crate::specfun::Truncation;
use crate::temme::ThresholdGeometry;

/// Auto truncation never uses more than this many terms.
pub const AUTO_MAX_TERMS: usize = 21;
/// Relative coefficient error above which auto truncation stops.
pub const AUTO_COEFF_REL: f64 = 1e-6;
/// Coefficients needed for auto truncation: the cap plus one neglected term.
pub const AUTO_TABLE_TERMS: usize = AUTO_MAX_TERMS + 1;

/// Coefficients of `(Σ_k inner[k] x^k)^j` for powers `0..=order`.
///
/// Uses the classical recurrence
/// `b_m = (1/(m a_0)) Σ_{k=1..m} (k(j+1) - m) a_k b_{m-k}`, valid for any
/// ring with division, so the same code serves real and complex tables.
pub fn compose_series_power<T>(inner: &[T], j: usize, order: usize) -> Result<Vec<T>>
where
    T: NumAssign + Copy + From<f64>,
{
    if j == 0 {
        return Err(domain("series power", 0.0));
    }
    series_powi(inner, j as i32, order)
}

/// As [`compose_series_power`], for any integer exponent including negative ones.
pub fn series_powi<T>(inner: &[T], j: i32, order: usize) -> Result<Vec<T>>
where
    T: NumAssign + Copy + From<f64>,
{
    let a0 = *inner.first().ok_or(Error::ZeroLeading)?;
    if a0 == T::zero() {
        return Err(Error::ZeroLeading);
    }
    let mut lead = T::one();
    for _ in 0..j.unsigned_abs() {
        lead *= a0;
    }
    if j < 0 {
        lead = T::one() / lead;
    }
    let mut out = Vec::with_capacity(order + 1);
    out.push(lead);
    let jp1 = f64::from(j) + 1.0;
    for m in 1..=order {
        let mut acc = T::zero();
        for k in 1..=m.min(inner.len() - 1) {
            let w = k as f64 * jp1 - m as f64;
            acc += T::from(w) * inner[k] * out[m - k];
        }
        out.push(acc / (T::from(m as f64) * a0));
    }
    Ok(out)
}

/// A truncated evaluation of the series for `g(γ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesResult {
    pub g_value: f64,
    /// Every computed term `τ_k`, used or not.
    pub terms: Vec<f64>,
    /// Number of terms summed; `terms[truncation_index]` is the first neglected one.
    pub truncation_index: usize,
    pub smallest_term_magnitude: f64,
    pub next_term: f64,
    /// Propagated error of the coefficients actually summed.
    pub coefficient_error: f64,
}

/// `g(γ) ≈ Σ_{k<K} c_{2k} (Γ(k+½)/Γ(½)) (4 s_γ / n)^{k+½} / (2√π)`.
pub fn g_series(
    tables: &CoefficientTables,
    geom: &ThresholdGeometry,
    n: f64,
    truncation: Truncation,
) -> Result<SeriesResult> {
    if !(n >= 1.0) || !n.is_finite() {
        return Err(domain("block length", n));
    }
    let c = &tables.c_even;
    if c.len() < 2 {
        return Err(domain("coefficient count", c.len() as f64));
    }
    let x = 4.0 * geom.s_gamma / n;
    let mut base = x.sqrt() / (2.0 * std::f64::consts::PI.sqrt());
    let mut terms = Vec::with_capacity(c.len());
    let mut term_err = Vec::with_capacity(c.len());
    for (k, ck) in c.iter().enumerate() {
        if k > 0 {
            base *= (k as f64 - 0.5) * x;
        }
        terms.push(ck * base);
        term_err.push(tables.c_even_error[k] * base);
    }
    let last = c.len() - 1;
    let used = match truncation {
        Truncation::Terms(k) if (1..=last).contains(&k) => k,
        Truncation::Terms(k) => return Err(domain("series terms", k as f64)),
        Truncation::Auto => {
            // the first neglected term must itself be trustworthy
            let reliable = tables.reliable_terms(AUTO_COEFF_REL).max(2) - 1;
            let mut best = 1;
            for k in 2..=last.min(AUTO_MAX_TERMS).min(reliable) {
                if terms[k].abs() < terms[best].abs() {
                    best = k;
                }
            }
            best
        }
    };
    let smallest = terms[1..].iter().fold(f64::INFINITY, |m, t| m.min(t.abs()));
    Ok(SeriesResult {
        g_value: terms[..used].iter().sum(),
        next_term: terms[used],
        truncation_index: used,
        coefficient_error: term_err[..used].iter().sum(),
        smallest_term_magnitude: smallest,
        terms,
    })
}
