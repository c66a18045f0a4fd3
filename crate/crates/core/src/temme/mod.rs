//! Threshold geometry, the steepest-descent path and the single-integral
//! evaluator for the missed-detection and false-alarm probabilities.

mod integral;
mod path;
mod prob;

pub use integral::{g_integral, g_integral_with, IntegralOptions, PHI_CUTOFF_EXPONENT};
pub use path::{descent_path, path_point, PathBase, PathPoint};
pub use prob::{log_prob, Strategy, ORACLE_MAX_N};

use crate::error::{domain, Result};

/// SNR and the quantities derived from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub omega: f64,
    /// `½ log2(1 + Ω)`.
    pub capacity_bits: f64,
    /// `½ ln(1 + Ω)`, the limit of the solved threshold as `n → ∞`.
    pub gamma_bar: f64,
}

impl ChannelParams {
    pub fn new(omega: f64) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(domain("SNR", omega));
        }
        let gamma_bar = 0.5 * omega.ln_1p();
        Ok(ChannelParams {
            omega,
            capacity_bits: gamma_bar * std::f64::consts::LOG2_E,
            gamma_bar,
        })
    }

    pub fn from_db(db: f64) -> Result<Self> {
        Self::new(10f64.powf(db / 10.0))
    }

    pub fn omega_db(&self) -> f64 {
        10.0 * self.omega.log10()
    }
}

/// The open interval of thresholds on which both probabilities stay below ½.
pub fn validity_window(params: &ChannelParams) -> (f64, f64) {
    let om = params.omega;
    (0.5 * (om / (1.0 + om)).ln_1p(), params.gamma_bar)
}

/// Whether `gamma` lies strictly inside [`validity_window`].
pub fn in_window(gamma: f64, params: &ChannelParams) -> bool {
    let (lo, hi) = validity_window(params);
    gamma > lo && gamma < hi
}

/// A threshold `γ` together with its hyperbolic functions and the
/// equivalent likelihood-ratio thresholds `λ′` and `λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdGeometry {
    pub gamma: f64,
    pub s_gamma: f64,
    pub c_gamma: f64,
    pub t_gamma: f64,
    pub lambda_prime: f64,
    pub lambda: f64,
    pub omega: f64,
}

pub fn make_threshold(gamma: f64, params: &ChannelParams) -> Result<ThresholdGeometry> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(domain("threshold gamma", gamma));
    }
    let om = params.omega;
    let s = gamma.sinh();
    let c = gamma.cosh();
    let lambda_prime = om / (4.0 * s * s);
    Ok(ThresholdGeometry {
        gamma,
        s_gamma: s,
        c_gamma: c,
        t_gamma: gamma.tanh(),
        lambda_prime,
        lambda: 0.5 * (1.0 + om.ln_1p() - lambda_prime * om / (1.0 + om)),
        omega: om,
    })
}

/// Inverse of the `γ → λ′` map.
pub fn threshold_from_lambda_prime(lambda_prime: f64, params: &ChannelParams) -> Result<ThresholdGeometry> {
    if !(lambda_prime > 0.0) || !lambda_prime.is_finite() {
        return Err(domain("lambda prime", lambda_prime));
    }
    make_threshold((params.omega / (4.0 * lambda_prime)).sqrt().asinh(), params)
}

/// `α(x) = c_γ - cosh x + s_γ (x - γ)`.
pub fn alpha(x: f64, geom: &ThresholdGeometry) -> f64 {
    alpha_offset(x - geom.gamma, geom)
}

/// `α(γ + δ) = s_γ (δ - sinh δ) - 2 c_γ sinh²(δ/2)`, free of cancellation for small `δ`.
pub(crate) fn alpha_offset(delta: f64, geom: &ThresholdGeometry) -> f64 {
    let half = (0.5 * delta).sinh();
    geom.s_gamma * delta_minus_sinh(delta) - 2.0 * geom.c_gamma * half * half
}

fn delta_minus_sinh(d: f64) -> f64 {
    if d.abs() > 0.5 {
        return d - d.sinh();
    }
    // -(d³/3! + d⁵/5! + ...)
    let d2 = d * d;
    let mut term = d * d2 / 6.0;
    let mut sum = term;
    let mut k = 3.0;
    while term.abs() > sum.abs() * 1e-17 {
        term *= d2 / ((k + 1.0) * (k + 2.0));
        sum += term;
        k += 2.0;
    }
    -sum
}

/// Which of the two error events is being evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    /// Missed detection: the true output law falls below the threshold.
    Md,
    /// False alarm: the auxiliary law exceeds the threshold.
    Fa,
}

impl Kind {
    pub const BOTH: [Kind; 2] = [Kind::Md, Kind::Fa];

    /// `+1` for MD, `-1` for FA: the sign of `g` inside the window.
    pub fn orientation(self) -> f64 {
        match self {
            Kind::Md => 1.0,
            Kind::Fa => -1.0,
        }
    }
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Kind::Md => "MD",
            Kind::Fa => "FA",
        })
    }
}

/// Per-kind saddle location `θ`, exponent `v` and the sign of `γ - θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KindGeometry {
    pub kind: Kind,
    pub theta: f64,
    /// `θ - γ`, kept separately so the pole distance is not re-derived by subtraction.
    pub theta_minus_gamma: f64,
    /// `sign(γ - θ)`; zero only when the two coincide exactly.
    pub step_sign: i8,
    pub v: f64,
}

impl KindGeometry {
    /// Whether the unit step in the representation is active.
    pub fn step_active(&self) -> bool {
        match self.kind {
            Kind::Md => self.step_sign > 0,
            Kind::Fa => self.step_sign < 0,
        }
    }
}

pub fn kind_geometry(geom: &ThresholdGeometry, params: &ChannelParams, kind: Kind) -> KindGeometry {
    let theta_md = (params.omega / (2.0 * geom.s_gamma)).ln();
    let theta = match kind {
        Kind::Md => theta_md,
        Kind::Fa => theta_md - params.omega.ln_1p(),
    };
    let tmg = theta - geom.gamma;
    let step_sign = if tmg < 0.0 {
        1
    } else if tmg > 0.0 {
        -1
    } else {
        0
    };
    KindGeometry {
        kind,
        theta,
        theta_minus_gamma: tmg,
        step_sign,
        v: (-alpha_offset(tmg, geom) / geom.s_gamma).max(0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(om: f64) -> ChannelParams {
        ChannelParams::new(om).unwrap()
    }

    #[test]
    fn channel_params() {
        let c = p(1.0);
        assert!((c.capacity_bits - 0.5).abs() < 1e-15);
        assert!((c.gamma_bar - std::f64::consts::LN_2 * c.capacity_bits).abs() < 1e-15);
        assert!(ChannelParams::new(0.0).is_err());
        assert!((ChannelParams::from_db(0.0).unwrap().omega - 1.0).abs() < 1e-15);
    }

    #[test]
    fn window_values() {
        let (lo, hi) = validity_window(&p(1.0));
        assert!((lo - 0.5 * 1.5f64.ln()).abs() < 1e-15);
        assert!((hi - 0.5 * 2f64.ln()).abs() < 1e-15);
        let (lo, hi) = validity_window(&p(1e-9));
        assert!(hi - lo < 1e-15);
        assert_eq!(validity_window(&p(3.0)).1, p(3.0).gamma_bar);
    }

    #[test]
    fn threshold_at_capacity() {
        let params = p(1.0);
        let g = make_threshold(params.gamma_bar, &params).unwrap();
        assert!((g.lambda_prime - 2.0).abs() < 1e-14);
        assert!((g.c_gamma * g.c_gamma - g.s_gamma * g.s_gamma - 1.0).abs() < 1e-12);
        let g = make_threshold(0.5, &params).unwrap();
        let expect = 1.0 / (4.0 * 0.5f64.sinh().powi(2));
        assert!((g.lambda_prime - expect).abs() < 1e-15);
        assert!(make_threshold(0.0, &params).is_err());
    }

    #[test]
    fn alpha_shape() {
        let params = p(1.0);
        let g = make_threshold(0.4, &params).unwrap();
        assert_eq!(alpha(0.4, &g), 0.0);
        for d in [0.1, 1.0] {
            assert!(alpha(0.4 + d, &g) < 0.0 && alpha(0.4 - d, &g) < 0.0);
        }
        // Taylor: -(c/2) δ² - (s/6) δ³ - (c/24) δ⁴
        let d: f64 = 0.01;
        let taylor = -(g.c_gamma / 2.0) * d * d - g.s_gamma / 6.0 * d.powi(3) - g.c_gamma / 24.0 * d.powi(4);
        assert!((alpha(0.4 + d, &g) / taylor - 1.0).abs() < 1e-7);
        assert!((alpha(0.4 + d, &g) / (-(g.c_gamma / 2.0) * 1e-4) - 1.0).abs() < 0.01);
        // direct formula away from γ
        let x: f64 = 2.3;
        let direct = g.c_gamma - x.cosh() + g.s_gamma * (x - 0.4);
        assert!((alpha(x, &g) - direct).abs() < 1e-14);
    }

    #[test]
    fn kind_geometry_at_capacity() {
        let params = p(1.0);
        let g = make_threshold(params.gamma_bar, &params).unwrap();
        let md = kind_geometry(&g, &params, Kind::Md);
        assert!((md.theta - params.gamma_bar).abs() < 1e-15);
        assert!(md.v < 1e-30);
        let fa = kind_geometry(&g, &params, Kind::Fa);
        assert!((fa.theta + params.gamma_bar).abs() < 1e-15);
        assert!((fa.v - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn step_signs_inside_window() {
        for om in [0.1, 1.0, 10.0] {
            let params = p(om);
            let (lo, hi) = validity_window(&params);
            for i in 1..20 {
                let gamma = lo + (hi - lo) * i as f64 / 20.0;
                let g = make_threshold(gamma, &params).unwrap();
                let md = kind_geometry(&g, &params, Kind::Md);
                let fa = kind_geometry(&g, &params, Kind::Fa);
                assert_eq!((md.step_sign, fa.step_sign), (-1, 1));
                assert!(!md.step_active() && !fa.step_active());
                assert!((fa.theta - (md.theta - om.ln_1p())).abs() == 0.0);
            }
        }
    }

    proptest! {
        #[test]
        fn lambda_prime_round_trip(gamma in 1e-3f64..5.0, om in 1e-2f64..1e3) {
            let params = p(om);
            let g = make_threshold(gamma, &params).unwrap();
            let back = threshold_from_lambda_prime(g.lambda_prime, &params).unwrap();
            prop_assert!((back.gamma / gamma - 1.0).abs() < 1e-12);
        }

        #[test]
        fn v_is_nonnegative(gamma in 1e-3f64..5.0, om in 1e-2f64..1e3) {
            let params = p(om);
            let g = make_threshold(gamma, &params).unwrap();
            for k in Kind::BOTH {
                prop_assert!(kind_geometry(&g, &params, k).v >= 0.0);
            }
        }

        #[test]
        fn alpha_is_nonpositive(gamma in 1e-3f64..5.0, x in -10.0f64..10.0) {
            let g = make_threshold(gamma, &p(1.0)).unwrap();
            prop_assert!(alpha(x, &g) <= 0.0);
        }
    }
}
