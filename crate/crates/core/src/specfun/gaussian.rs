use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use super::{SeriesSum, Truncation};
use crate::error::{domain, Result};
use crate::roots::{find_root, RootOptions};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
/// Below this the tail comes from `erfc`, above it from the Mills-ratio continued fraction.
const CF_THRESHOLD: f64 = 6.0;
const MAX_SERIES_TERMS: usize = 400;

/// Gaussian tail `Q(x) = P[N(0,1) > x]`.
pub fn gaussian_q(x: f64) -> f64 {
    if x < 0.0 {
        return 1.0 - gaussian_q(-x);
    }
    if x < CF_THRESHOLD {
        0.5 * libm::erfc(x * FRAC_1_SQRT_2)
    } else {
        (-0.5 * x * x).exp() * scaled_q(x)
    }
}

/// `ln Q(x)`, accurate deep into the upper tail.
pub fn ln_gaussian_q(x: f64) -> f64 {
    if x < 1.0 {
        gaussian_q(x).ln()
    } else {
        -0.5 * x * x + ln_scaled_q(x)
    }
}

/// The scaled tail `q(x) = exp(x²/2) Q(x)` for `x >= 0`.
///
/// For negative arguments use the odd extension through
/// `Q(x) = 1 - exp(-x²/2) q(|x|)`.
pub fn scaled_q(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x < CF_THRESHOLD {
        0.5 * libm::erfc(x * FRAC_1_SQRT_2) * (0.5 * x * x).exp()
    } else {
        mills_ratio(x) * FRAC_1_SQRT_2PI
    }
}

pub fn ln_scaled_q(x: f64) -> f64 {
    scaled_q(x).ln()
}

/// `Q(x)/phi(x)` by the continued fraction `1/(x+1/(x+2/(x+3/(x+...))))`, modified Lentz.
fn mills_ratio(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..500 {
        let a = k as f64;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / f
}

/// Partial sums of the divergent expansion
/// `q(x) ~ (1/(2√π)) Σ (-1)^k Γ(k+½)/Γ(½) (2/x²)^(k+½)`.
///
/// With [`Truncation::Auto`] the sum stops before the smallest term, which is
/// then reported as `next_term`.
pub fn q_series(x: f64, truncation: Truncation) -> Result<SeriesSum> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("q_series", x));
    }
    let ratio = 2.0 / (x * x);
    let limit = match truncation {
        Truncation::Terms(k) if k >= 1 => k + 1,
        Truncation::Terms(k) => return Err(domain("q_series terms", k as f64)),
        Truncation::Auto => MAX_SERIES_TERMS,
    };
    // term_0 = (2/x²)^{1/2} / (2√π)
    let mut term = ratio.sqrt() / (2.0 * PI.sqrt());
    let mut terms = Vec::with_capacity(limit.min(64));
    terms.push(term);
    for k in 1..limit {
        // Γ(k+½)/Γ(½) = (k-½) Γ(k-½)/Γ(½)
        term *= -(k as f64 - 0.5) * ratio;
        terms.push(term);
        if truncation == Truncation::Auto && term.abs() > terms[k - 1].abs() {
            break;
        }
    }
    let used = match truncation {
        Truncation::Terms(k) => k,
        Truncation::Auto => {
            let mut best = 1;
            for k in 1..terms.len() {
                if terms[k].abs() < terms[best].abs() {
                    best = k;
                }
            }
            best
        }
    };
    Ok(SeriesSum {
        value: terms[..used].iter().sum(),
        terms_used: used,
        next_term: terms[used],
    })
}

/// Inverse Gaussian tail: the `x` with `Q(x) = p`.
///
/// Solved by bracketed root finding on `ln Q`, which is strictly decreasing.
pub fn gaussian_q_inv(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(domain("gaussian_q_inv", p));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    if p > 0.5 {
        return gaussian_q_inv(1.0 - p).map(|x| -x);
    }
    let target = p.ln();
    // Q(x) <= exp(-x²/2)/2 bounds the root from above.
    let hi = (-2.0 * (2.0 * p).ln()).sqrt().max(1e-3) + 1.0;
    let opts = RootOptions {
        x_abs: 0.0,
        x_rel: 2.0 * f64::EPSILON,
        f_abs: 1e-15,
        max_iter: 200,
    };
    let root = find_root(|x| Ok(ln_gaussian_q(x) - target), 0.0, hi, None, None, opts)?;
    Ok(root.x)
}

/// The error function.
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Inverse error function on `(-1, 1)`.
pub fn erf_inv(y: f64) -> Result<f64> {
    if !(y.abs() < 1.0) {
        return Err(domain("erf_inv", y));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    let a = y.abs();
    // erf(x) = 1 - 2 Q(x√2)
    let mut x = gaussian_q_inv(0.5 * (1.0 - a))? / SQRT_2;
    let two_over_sqrt_pi = 2.0 / PI.sqrt();
    for _ in 0..3 {
        let resid = if a < 0.5 {
            libm::erf(x) - a
        } else {
            (1.0 - a) - libm::erfc(x)
        };
        let slope = two_over_sqrt_pi * (-x * x).exp();
        if slope == 0.0 {
            break;
        }
        x -= resid / slope;
    }
    Ok(x.copysign(y))
}
