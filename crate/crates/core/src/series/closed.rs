use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::logprob::{LogProb, Method};
use crate::temme::{in_window, kind_geometry, validity_window, ChannelParams, Kind, KindGeometry, ThresholdGeometry};

/// `g₀(γ) = √(t_γ/π) / (e^{θ-γ} - 1)`.
pub fn g0_closed(geom: &ThresholdGeometry, kg: &KindGeometry) -> f64 {
    (geom.t_gamma / PI).sqrt() / kg.theta_minus_gamma.exp_m1()
}

/// The relative second-order coefficient: `g ≈ (g₀/√n)(1 - g₁/n)`.
pub fn g1_closed(geom: &ThresholdGeometry, kg: &KindGeometry) -> f64 {
    let t = geom.t_gamma;
    let em = kg.theta_minus_gamma.exp_m1();
    t * ((9.0 - 12.0 * t + 5.0 * t * t) / 12.0 + (2.0 + (3.0 - t) * em) / (em * em))
}

/// One- or two-term asymptotic `ln P`, valid strictly inside the window.
pub fn closed_form_logprob(
    geom: &ThresholdGeometry,
    params: &ChannelParams,
    kind: Kind,
    n: u64,
    order: usize,
) -> Result<LogProb> {
    if !(order == 1 || order == 2) {
        return Err(domain("closed-form order", order as f64));
    }
    if !in_window(geom.gamma, params) {
        let (lo, hi) = validity_window(params);
        return Err(Error::WindowViolation { gamma: geom.gamma, lo, hi });
    }
    if n == 0 {
        return Err(domain("block length", 0.0));
    }
    let kg = kind_geometry(geom, params, kind);
    let nf = n as f64;
    let g0 = kind.orientation() * g0_closed(geom, &kg);
    let mut lp = -0.5 * nf * kg.v - 0.5 * nf.ln() + g0.ln();
    if order == 2 {
        let ratio = g1_closed(geom, &kg) / nf;
        if ratio >= 1.0 {
            return Err(Error::OrderTwoBreakdown { ratio });
        }
        lp += (-ratio).ln_1p();
    }
    // the asymptotic form can exceed one near the pole; report it as certain
    Ok(LogProb::new(lp.min(0.0), Method::ClosedForm { order }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{build_coefficients, g_series};
    use crate::specfun::Truncation;
    use crate::temme::make_threshold;

    #[test]
    fn g1_nonnegative_and_two_term_smaller() {
        for om in [0.1, 1.0, 10.0] {
            let params = ChannelParams::new(om).unwrap();
            let (lo, hi) = validity_window(&params);
            for i in 1..50 {
                let g = make_threshold(lo + (hi - lo) * i as f64 / 50.0, &params).unwrap();
                for kind in Kind::BOTH {
                    let kg = kind_geometry(&g, &params, kind);
                    assert!(g1_closed(&g, &kg) >= 0.0, "om={om} i={i} {kind}");
                    for n in [100, 10_000] {
                        let p1 = closed_form_logprob(&g, &params, kind, n, 1).unwrap();
                        if let Ok(p2) = closed_form_logprob(&g, &params, kind, n, 2) {
                            assert!(p2.log_value <= p1.log_value);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn order_one_equals_single_series_term() {
        let params = ChannelParams::new(2.0).unwrap();
        let (lo, hi) = validity_window(&params);
        let g = make_threshold(lo + 0.4 * (hi - lo), &params).unwrap();
        for kind in Kind::BOTH {
            let kg = kind_geometry(&g, &params, kind);
            let t = build_coefficients(&g, kg.theta, 3).unwrap();
            let n = 5000u64;
            let s = g_series(&t, &g, n as f64, Truncation::Terms(1)).unwrap();
            let via_series = (kind.orientation() * s.g_value).ln() - 0.5 * n as f64 * kg.v;
            let closed = closed_form_logprob(&g, &params, kind, n, 1).unwrap().log_value;
            assert!((via_series - closed).abs() < 1e-13 * closed.abs());
        }
    }

    #[test]
    fn errors() {
        let params = ChannelParams::new(1.0).unwrap();
        let out = make_threshold(2.0, &params).unwrap();
        assert!(matches!(
            closed_form_logprob(&out, &params, Kind::Md, 100, 1),
            Err(Error::WindowViolation { .. })
        ));
        let (lo, hi) = validity_window(&params);
        let near = make_threshold(hi - 1e-6 * (hi - lo), &params).unwrap();
        assert!(matches!(
            closed_form_logprob(&near, &params, Kind::Md, 2, 2),
            Err(Error::OrderTwoBreakdown { .. })
        ));
        assert!(closed_form_logprob(&near, &params, Kind::Md, 2, 3).is_err());
    }
}
