use super::{g_integral, in_window, kind_geometry, validity_window, ChannelParams, Kind, KindGeometry, ThresholdGeometry};
use crate::error::{Error, Result};
use crate::logprob::{LogProb, LogSum, Method};
use crate::series::{build_coefficients, closed_form_logprob, g_series, AUTO_TABLE_TERMS};
use crate::specfun::{chi2_noncentral_cdf_oracle, Truncation};

/// Largest block length accepted by the Poisson-mixture oracle.
pub const ORACLE_MAX_N: u64 = 512;

const AUTO_ORACLE_MAX_N: u64 = 64;
const AUTO_INTEGRAL_MAX_N: u64 = 2000;
/// Auto mode abandons the series when the first neglected term exceeds this
/// fraction of the sum.
const AUTO_SERIES_GUARD: f64 = 1e-8;
/// Closer than this to the pole, the integral is evaluated on both sides and averaged.
const POLE_NUDGE: f64 = 1e-9;

/// How `log_prob` evaluates a probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Oracle for small `n`, the integral for moderate `n`, low rates or
    /// thresholds outside the window, and the series otherwise.
    Auto,
    Oracle,
    Integral,
    Series(Truncation),
    /// One- or two-term closed form.
    ClosedForm(usize),
}

/// `ln P_MD(γ)` or `ln P_FA(γ)` at block length `n`.
pub fn log_prob(
    geom: &ThresholdGeometry,
    params: &ChannelParams,
    kind: Kind,
    n: u64,
    strategy: Strategy,
) -> Result<LogProb> {
    let kg = kind_geometry(geom, params, kind);
    match strategy {
        Strategy::Oracle => oracle(geom, params, kind, n),
        Strategy::Integral => integral(geom, params, &kg, n),
        Strategy::Series(t) => series(geom, params, &kg, n, t),
        Strategy::ClosedForm(order) => closed_form_logprob(geom, params, kind, n, order),
        Strategy::Auto => {
            if n <= AUTO_ORACLE_MAX_N {
                return oracle(geom, params, kind, n);
            }
            let fa = kind_geometry(geom, params, Kind::Fa);
            // exponent-only rate estimate: -log2 P_FA / n ≈ v_FA / (2 ln 2)
            let low_rate = fa.v * std::f64::consts::LOG2_E * 0.5 < 3.0 / n as f64;
            if n <= AUTO_INTEGRAL_MAX_N || low_rate || !in_window(geom.gamma, params) {
                return integral(geom, params, &kg, n);
            }
            match series_checked(geom, &kg, n) {
                Some(p) => Ok(p),
                None => integral(geom, params, &kg, n),
            }
        }
    }
}

fn series_checked(geom: &ThresholdGeometry, kg: &KindGeometry, n: u64) -> Option<LogProb> {
    let tables = build_coefficients(geom, kg.theta, AUTO_TABLE_TERMS).ok()?;
    let s = g_series(&tables, geom, n as f64, Truncation::Auto).ok()?;
    if !(s.next_term.abs() + s.coefficient_error <= AUTO_SERIES_GUARD * s.g_value.abs()) {
        return None;
    }
    finish_in_window(s.g_value, kg, n, Method::Series { terms: s.truncation_index }).ok()
}

fn oracle(geom: &ThresholdGeometry, params: &ChannelParams, kind: Kind, n: u64) -> Result<LogProb> {
    if n > ORACLE_MAX_N {
        return Err(Error::OracleRange { n, max: ORACLE_MAX_N });
    }
    let nf = n as f64;
    let om = params.omega;
    let lp = match kind {
        Kind::Md => chi2_noncentral_cdf_oracle(nf * geom.lambda_prime, n, nf / om)?.log_ccdf,
        Kind::Fa => {
            chi2_noncentral_cdf_oracle(nf * geom.lambda_prime / (1.0 + om), n, nf * (1.0 + om) / om)?.log_cdf
        }
    };
    Ok(LogProb::new(lp, Method::Oracle))
}

fn series(
    geom: &ThresholdGeometry,
    params: &ChannelParams,
    kg: &KindGeometry,
    n: u64,
    t: Truncation,
) -> Result<LogProb> {
    if !in_window(geom.gamma, params) {
        let (lo, hi) = validity_window(params);
        return Err(Error::WindowViolation { gamma: geom.gamma, lo, hi });
    }
    let terms = match t {
        Truncation::Auto => AUTO_TABLE_TERMS,
        Truncation::Terms(k) => k + 1,
    };
    let tables = build_coefficients(geom, kg.theta, terms)?;
    let s = g_series(&tables, geom, n as f64, t)?;
    finish_in_window(s.g_value, kg, n, Method::Series { terms: s.truncation_index })
}

/// `ln(±g) - n v / 2`, the form taken inside the window where no step is active.
fn finish_in_window(g: f64, kg: &KindGeometry, n: u64, method: Method) -> Result<LogProb> {
    let signed = kg.kind.orientation() * g;
    if !(signed > 0.0) {
        return Err(Error::NonFinite { index: 0 });
    }
    Ok(LogProb::new(signed.ln() - 0.5 * n as f64 * kg.v, method))
}

fn integral(geom: &ThresholdGeometry, params: &ChannelParams, kg: &KindGeometry, n: u64) -> Result<LogProb> {
    if kg.theta_minus_gamma.abs() >= POLE_NUDGE {
        return integral_at(geom, kg, n);
    }
    // P is smooth through the pole even though g jumps by ±1 there; average
    // two evaluations placed symmetrically about it.
    let slope = 1.0 / geom.t_gamma + 1.0;
    let mut acc = LogSum::new();
    for side in [-1.0, 1.0] {
        let gamma = geom.gamma + (kg.theta_minus_gamma - side * POLE_NUDGE) / slope;
        let g = super::make_threshold(gamma, params)?;
        let k = kind_geometry(&g, params, kg.kind);
        acc.add(integral_at(&g, &k, n)?.log_value + (0.5f64).ln());
    }
    Ok(LogProb::new(acc.value(), Method::Integral))
}

fn integral_at(geom: &ThresholdGeometry, kg: &KindGeometry, n: u64) -> Result<LogProb> {
    let q = g_integral(geom, kg, n as f64)?;
    let half_nv = 0.5 * n as f64 * kg.v;
    if kg.step_active() {
        // P = 1 + (±g) e^{-nv/2}, with ±g < 0 here
        let x = kg.kind.orientation() * q.value * (-half_nv).exp();
        if !(x > -1.0) {
            return Err(Error::Quadrature { estimate: q.error / q.value.abs() });
        }
        Ok(LogProb::new(x.ln_1p(), Method::Integral))
    } else {
        finish_in_window(q.value, kg, n, Method::Integral)
            .map_err(|_| Error::Quadrature { estimate: q.error / q.value.abs() })
    }
}

#[cfg(test)]
mod tests {
    use super::super::make_threshold;
    use super::*;

    fn grid(om: f64) -> (ChannelParams, Vec<f64>) {
        let params = ChannelParams::new(om).unwrap();
        let (lo, hi) = validity_window(&params);
        let gs = [0.1, 0.3, 0.5, 0.7, 0.9].iter().map(|f| lo + f * (hi - lo)).collect();
        (params, gs)
    }

    #[test]
    fn integral_matches_oracle_at_n8() {
        let (params, gs) = grid(1.0);
        for gamma in gs {
            let g = make_threshold(gamma, &params).unwrap();
            for kind in Kind::BOTH {
                let a = log_prob(&g, &params, kind, 8, Strategy::Integral).unwrap();
                let b = log_prob(&g, &params, kind, 8, Strategy::Oracle).unwrap();
                assert!((a.log_value - b.log_value).abs() < 1e-8 * b.log_value.abs().max(1.0));
                assert_eq!(a.method, Method::Integral);
            }
        }
    }

    #[test]
    fn step_handling_outside_window() {
        let params = ChannelParams::new(1.0).unwrap();
        let (lo, hi) = validity_window(&params);
        for gamma in [0.5 * lo, hi * 1.3, hi * 3.0] {
            let g = make_threshold(gamma, &params).unwrap();
            for kind in Kind::BOTH {
                let a = log_prob(&g, &params, kind, 16, Strategy::Integral).unwrap();
                let b = log_prob(&g, &params, kind, 16, Strategy::Oracle).unwrap();
                assert!((a.log_value - b.log_value).abs() < 1e-8, "{gamma} {kind}");
            }
        }
    }

    #[test]
    fn exact_pole_is_continuous() {
        let params = ChannelParams::new(1.0).unwrap();
        let g = make_threshold(params.gamma_bar, &params).unwrap();
        let a = log_prob(&g, &params, Kind::Md, 40, Strategy::Integral).unwrap();
        let b = log_prob(&g, &params, Kind::Md, 40, Strategy::Oracle).unwrap();
        assert!((a.log_value - b.log_value).abs() < 1e-8);
        assert!(a.value() < 0.5 + 0.1 && a.value() > 0.4);
    }

    #[test]
    fn monotone_in_threshold() {
        let (params, gs) = grid(1.0);
        let mut last_md = f64::NEG_INFINITY;
        let mut last_fa = 0.0;
        for gamma in gs {
            let g = make_threshold(gamma, &params).unwrap();
            let md = log_prob(&g, &params, Kind::Md, 32, Strategy::Oracle).unwrap().log_value;
            let fa = log_prob(&g, &params, Kind::Fa, 32, Strategy::Oracle).unwrap().log_value;
            assert!(md > last_md && fa < last_fa);
            assert!(md < 0.5f64.ln() && fa < 0.5f64.ln());
            last_md = md;
            last_fa = fa;
        }
    }

    #[test]
    fn oracle_range_and_window_errors() {
        let params = ChannelParams::new(1.0).unwrap();
        let g = make_threshold(0.3, &params).unwrap();
        assert!(matches!(
            log_prob(&g, &params, Kind::Md, 513, Strategy::Oracle),
            Err(Error::OracleRange { .. })
        ));
        let out = make_threshold(1.0, &params).unwrap();
        assert!(matches!(
            log_prob(&out, &params, Kind::Md, 1000, Strategy::Series(Truncation::Auto)),
            Err(Error::WindowViolation { .. })
        ));
    }

    #[test]
    fn auto_picks_methods_by_policy() {
        let (params, gs) = grid(1.0);
        let g = make_threshold(gs[2], &params).unwrap();
        let m = |n| log_prob(&g, &params, Kind::Md, n, Strategy::Auto).unwrap().method;
        assert_eq!(m(64), Method::Oracle);
        assert_eq!(m(1000), Method::Integral);
        assert!(matches!(m(100_000), Method::Series { .. }));
    }
}
