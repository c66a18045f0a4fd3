use super::gamma::ln_gamma_pq;
use crate::error::{domain, Result};
use crate::logprob::{LogProb, LogSum, Method};

/// Relative mass at which the Poisson mixture is truncated.
pub const ORACLE_TAIL_MASS: f64 = 1e-30;
const MAX_TERMS: u64 = 2_000_000;

/// Both tails of a non-central chi-squared law, in natural-log form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chi2Tails {
    pub log_cdf: f64,
    pub log_ccdf: f64,
    /// False when the truncation bound was not reached within the term budget.
    pub converged: bool,
}

impl Chi2Tails {
    pub fn cdf(&self) -> LogProb {
        LogProb::new(self.log_cdf, Method::Oracle)
    }

    pub fn ccdf(&self) -> LogProb {
        LogProb::new(self.log_ccdf, Method::Oracle)
    }
}

/// CDF and CCDF at `a` of the non-central chi-squared law with `n` degrees of
/// freedom and noncentrality `s`.
///
/// Both tails are Poisson(s/2) mixtures of central laws,
/// `F(a) = Σ_j w_j P(n/2 + j, a/2)` and `1 - F(a) = Σ_j w_j Q(n/2 + j, a/2)`,
/// summed outward from the Poisson mode. Each tail is summed on its own so
/// that neither is formed as a difference. The sum stops once a geometric
/// bound on the remaining mass falls below [`ORACLE_TAIL_MASS`] times the
/// running total.
pub fn chi2_noncentral_cdf_oracle(a: f64, n: u64, s: f64) -> Result<Chi2Tails> {
    if !(a >= 0.0) || a.is_infinite() {
        return Err(domain("chi-squared argument", a));
    }
    if n == 0 {
        return Err(domain("chi-squared degrees of freedom", 0.0));
    }
    if !(s >= 0.0) || s.is_infinite() {
        return Err(domain("chi-squared noncentrality", s));
    }
    if a == 0.0 {
        return Ok(Chi2Tails { log_cdf: f64::NEG_INFINITY, log_ccdf: 0.0, converged: true });
    }
    let x = 0.5 * a;
    let half_n = 0.5 * n as f64;
    let mu = 0.5 * s;
    if mu == 0.0 {
        let (lp, lq) = ln_gamma_pq(half_n, x)?;
        return Ok(Chi2Tails { log_cdf: lp, log_ccdf: lq, converged: true });
    }
    let ln_mu = mu.ln();
    let ln_weight = |j: u64| -mu + j as f64 * ln_mu - libm::lgamma(j as f64 + 1.0);
    let ln_tol = ORACLE_TAIL_MASS.ln();

    let mut cdf = LogSum::new();
    let mut ccdf = LogSum::new();
    let mode = mu.floor() as u64;
    let mut converged = false;

    // upward from the mode: w_{k+1}/w_k = mu/(k+1) and P(n/2+k, x) decreases in k
    let mut j = mode;
    while j <= mode + MAX_TERMS {
        let lw = ln_weight(j);
        let (lp, lq) = ln_gamma_pq(half_n + j as f64, x)?;
        cdf.add(lw + lp);
        ccdf.add(lw + lq);
        let rho = mu / (j as f64 + 2.0);
        if rho < 1.0 {
            let ln_tail = ln_weight(j + 1) - (-rho).ln_1p();
            if ln_tail + lp <= cdf.value() + ln_tol && ln_tail <= ccdf.value() + ln_tol {
                converged = true;
                break;
            }
        }
        j += 1;
    }
    if !converged {
        return Ok(finish(cdf, ccdf, false));
    }

    // downward: w_{k-1}/w_k = k/mu and Q(n/2+k, x) decreases as k decreases
    let mut converged_down = true;
    let mut j = mode;
    while j > 0 {
        j -= 1;
        let lw = ln_weight(j);
        let (lp, lq) = ln_gamma_pq(half_n + j as f64, x)?;
        cdf.add(lw + lp);
        ccdf.add(lw + lq);
        if j == 0 {
            break;
        }
        let rho = j as f64 / mu;
        let ln_tail = ln_weight(j - 1) - (-rho).ln_1p();
        if ln_tail <= cdf.value() + ln_tol && ln_tail + lq <= ccdf.value() + ln_tol {
            break;
        }
        if mode - j > MAX_TERMS {
            converged_down = false;
            break;
        }
    }
    Ok(finish(cdf, ccdf, converged_down))
}

fn finish(cdf: LogSum, ccdf: LogSum, converged: bool) -> Chi2Tails {
    Chi2Tails {
        log_cdf: cdf.value().min(0.0),
        log_ccdf: ccdf.value().min(0.0),
        converged,
    }
}
