use crate::error::{domain, Result};

const MAX_ITER: usize = 200_000;
const TINY: f64 = 1e-300;

/// `(ln P(a, x), ln Q(a, x))` for the regularized incomplete gamma function.
///
/// The smaller tail is computed directly (series for `x < a + 1`, continued
/// fraction otherwise) and the larger one as its complement, so both logs
/// stay accurate when the other tail underflows.
pub fn ln_gamma_pq(a: f64, x: f64) -> Result<(f64, f64)> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(domain("incomplete gamma order", a));
    }
    if !(x >= 0.0) {
        return Err(domain("incomplete gamma argument", x));
    }
    if x == 0.0 {
        return Ok((f64::NEG_INFINITY, 0.0));
    }
    if x.is_infinite() {
        return Ok((0.0, f64::NEG_INFINITY));
    }
    let prefix = a * x.ln() - x - libm::lgamma(a);
    if x < a + 1.0 {
        let ln_p = prefix + lower_series(a, x).ln();
        Ok((ln_p, ln_complement(ln_p)))
    } else {
        let ln_q = prefix + upper_fraction(a, x).ln();
        Ok((ln_complement(ln_q), ln_q))
    }
}

fn ln_complement(ln_v: f64) -> f64 {
    if ln_v < -0.693 {
        (-ln_v.exp()).ln_1p()
    } else {
        (-ln_v.exp_m1()).ln()
    }
}

/// `Σ x^k / (a (a+1) ... (a+k))`.
fn lower_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut del = 1.0 / a;
    let mut sum = del;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del < sum * f64::EPSILON * 0.5 {
            break;
        }
    }
    sum
}

/// Continued fraction for `Q(a,x) e^x x^(-a) Γ(a)`, modified Lentz.
fn upper_fraction(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < f64::EPSILON {
            break;
        }
    }
    h
}

/// `ln(Γ(k + ½) / Γ(½))`.
pub fn ln_half_gamma_ratio(k: usize) -> f64 {
    (1..=k).map(|j| (j as f64 - 0.5).ln()).sum()
}
