use std::f64::consts::PI;

use super::path::{descent_path, g_tilde};
use super::{KindGeometry, ThresholdGeometry};
use crate::error::{domain, Result};
use crate::quadrature::{integrate, GaussLegendre, QuadOptions, Quadrature};

/// The path is cut where `n h(φ) / (2 s_γ)` reaches this value; the
/// discarded tail is below `e^-80 ≈ 2e-35` of the peak.
pub const PHI_CUTOFF_EXPONENT: f64 = 80.0;

#[derive(Debug, Clone, Copy)]
pub struct IntegralOptions {
    /// Gauss-Legendre points per panel.
    pub rule_order: usize,
    pub quad: QuadOptions,
}

impl Default for IntegralOptions {
    fn default() -> Self {
        IntegralOptions {
            rule_order: 20,
            quad: QuadOptions::default(),
        }
    }
}

/// `g = (1/π) ∫ g̃(φ) exp(-n u²(φ) / (4 s_γ)) dφ` over the descent path.
///
/// The returned value and error estimate already include the `1/π` factor.
pub fn g_integral(geom: &ThresholdGeometry, kg: &KindGeometry, n: f64) -> Result<Quadrature> {
    g_integral_with(geom, kg, n, IntegralOptions::default())
}

pub fn g_integral_with(
    geom: &ThresholdGeometry,
    kg: &KindGeometry,
    n: f64,
    opts: IntegralOptions,
) -> Result<Quadrature> {
    if !(n >= 1.0) || !n.is_finite() {
        return Err(domain("block length", n));
    }
    let scale = n / (2.0 * geom.s_gamma);
    let phi_max = cutoff_angle(geom, scale)?;
    let custom;
    let rule = if opts.rule_order == 20 {
        GaussLegendre::default_rule()
    } else {
        custom = GaussLegendre::new(opts.rule_order);
        &custom
    };
    let mut failure = None;
    let q = integrate(
        |phi| match descent_path(phi, geom) {
            Ok(b) => g_tilde(&b, kg) * (-scale * b.h).exp(),
            Err(e) => {
                failure = Some(e);
                0.0
            }
        },
        0.0,
        phi_max,
        rule,
        opts.quad,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(Quadrature {
        value: q.value / PI,
        error: q.error / PI,
        abs_value: q.abs_value / PI,
        panels: q.panels,
    })
}

/// Bisection for `scale · h(φ) = PHI_CUTOFF_EXPONENT`; `h` is nondecreasing.
fn cutoff_angle(geom: &ThresholdGeometry, scale: f64) -> Result<f64> {
    let top = PI * (1.0 - 1e-15);
    if scale * descent_path(top, geom)?.h <= PHI_CUTOFF_EXPONENT {
        return Ok(top);
    }
    let (mut lo, mut hi) = (0.0, top);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if scale * descent_path(mid, geom)?.h < PHI_CUTOFF_EXPONENT {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    Ok(hi)
}
