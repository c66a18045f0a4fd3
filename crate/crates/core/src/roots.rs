//! Bracketed root finding and one-dimensional maximization.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    /// Absolute tolerance on the abscissa.
    pub x_abs: f64,
    /// Relative tolerance on the abscissa.
    pub x_rel: f64,
    /// Stop as soon as `|f(x)|` falls below this.
    pub f_abs: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            x_abs: 0.0,
            x_rel: 4.0 * f64::EPSILON,
            f_abs: 1e-12,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Brent's method: bisection safeguarding secant and inverse-quadratic steps.
///
/// `f_lo`/`f_hi` may be supplied when the endpoint values are already known.
/// The iteration stops on either the abscissa or the residual tolerance, so
/// noisy objectives (quadrature, series) still terminate.
pub fn find_root<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    f_lo: Option<f64>,
    f_hi: Option<f64>,
    opts: RootOptions,
) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut a = lo;
    let mut b = hi;
    let mut fa = match f_lo {
        Some(v) => v,
        None => f(a)?,
    };
    let mut fb = match f_hi {
        Some(v) => v,
        None => f(b)?,
    };
    if fa == 0.0 {
        return Ok(Root { x: a, residual: 0.0, iterations: 0 });
    }
    if fb == 0.0 {
        return Ok(Root { x: b, residual: 0.0, iterations: 0 });
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::NoBracket { lo, hi });
    }

    let mut c = b;
    let mut fc = fb;
    let mut d = b - a;
    let mut e = d;
    for iter in 0..opts.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * opts.x_abs.max(opts.x_rel * b.abs());
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol || fb.abs() <= opts.f_abs {
            return Ok(Root { x: b, residual: fb, iterations: iter });
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(xm) };
        fb = f(b)?;
    }
    Ok(Root { x: b, residual: fb, iterations: opts.max_iter })
}

/// Golden-section search for the maximum of a unimodal function on `[a, b]`.
///
/// Returns `(x, f(x))`; stops once the bracket is narrower than
/// `rel_tol * |x|`.
pub fn golden_max<F>(mut f: F, a: f64, b: f64, rel_tol: f64, max_iter: usize) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..max_iter {
        if (b - a) <= rel_tol * 0.5 * (a.abs() + b.abs()) {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}
