use std::f64::consts::PI;

use super::{alpha_offset, KindGeometry, ThresholdGeometry};
use crate::error::{domain, Result};

/// Kind-independent quantities on the steepest-descent path at angle `φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathBase {
    pub phi: f64,
    pub sin_phi: f64,
    /// `1 - cos φ = 2 sin²(φ/2)`.
    pub versine: f64,
    pub sinc: f64,
    pub r: f64,
    pub r_minus_gamma: f64,
    pub r_prime: f64,
    pub cosh_r: f64,
    pub h: f64,
    pub h_prime: f64,
    pub u: f64,
}

/// Path quantities plus the kind-dependent integrand factor `g̃` and the
/// Taylor-normalized ratio `c(φ) = g̃ u / h′`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathPoint {
    pub phi: f64,
    pub r: f64,
    pub r_prime: f64,
    pub u: f64,
    pub h: f64,
    pub h_prime: f64,
    pub g_tilde: f64,
    pub c_of_phi: f64,
}

/// Returns `(1 - sinc φ, sin φ - φ cos φ)`, by series below `φ = 1`.
fn sinc_defects(phi: f64) -> (f64, f64) {
    if phi >= 1.0 {
        let (s, c) = phi.sin_cos();
        return (1.0 - s / phi, s - phi * c);
    }
    // term_m = (-1)^{m+1} φ^{2m} / (2m+1)!
    let p2 = phi * phi;
    let mut term = p2 / 6.0;
    let mut one_minus_sinc = term;
    let mut odd = 2.0 * term;
    let mut m = 1.0;
    while term.abs() > 1e-18 * one_minus_sinc.abs() {
        m += 1.0;
        term *= -p2 / ((2.0 * m) * (2.0 * m + 1.0));
        one_minus_sinc += term;
        odd += 2.0 * m * term;
    }
    (one_minus_sinc, phi * odd)
}

pub fn descent_path(phi: f64, geom: &ThresholdGeometry) -> Result<PathBase> {
    if !(0.0..PI).contains(&phi) {
        return Err(domain("path angle", phi));
    }
    let s = geom.s_gamma;
    let c = geom.c_gamma;
    if phi == 0.0 {
        return Ok(PathBase {
            phi,
            sin_phi: 0.0,
            versine: 0.0,
            sinc: 1.0,
            r: geom.gamma,
            r_minus_gamma: 0.0,
            r_prime: 0.0,
            cosh_r: c,
            h: 0.0,
            h_prime: 0.0,
            u: 0.0,
        });
    }
    let sin_phi = phi.sin();
    let half = (0.5 * phi).sin();
    let versine = 2.0 * half * half;
    let (one_minus_sinc, odd) = sinc_defects(phi);
    let sinc = 1.0 - one_minus_sinc;

    let x = s / sinc;
    let w = x.hypot(1.0);
    // asinh x - asinh s = ln((x + w) / (s + c)), with x - s and w - c formed without cancellation
    let d = s * one_minus_sinc / sinc;
    let dw = d * (x + s) / (w + c);
    let r_minus_gamma = ((d + dw) / (s + c)).ln_1p();
    let r = geom.gamma + r_minus_gamma;

    let q = odd / (phi * sin_phi);
    let r_prime = q / (1.0 + (sinc / s).powi(2)).sqrt();
    let h = (versine * w + alpha_offset(r_minus_gamma, geom)).max(0.0);
    Ok(PathBase {
        phi,
        sin_phi,
        versine,
        sinc,
        r,
        r_minus_gamma,
        r_prime,
        cosh_r: w,
        h,
        h_prime: sin_phi * w * (1.0 + r_prime * r_prime),
        u: (2.0 * h).sqrt(),
    })
}

/// `g̃(φ)` from the path base, without re-deriving `θ - r` by subtraction of large values.
pub(crate) fn g_tilde(base: &PathBase, kg: &KindGeometry) -> f64 {
    let tmr = kg.theta_minus_gamma - base.r_minus_gamma;
    let em = tmr.exp_m1();
    if base.phi == 0.0 {
        return 1.0 / em;
    }
    let e = em + 1.0;
    let num = em + e * (base.r_prime * base.sin_phi - base.versine);
    let a = em + base.versine;
    num / (a * a + base.sin_phi * base.sin_phi)
}

pub fn path_point(phi: f64, geom: &ThresholdGeometry, kg: &KindGeometry) -> Result<PathPoint> {
    let base = descent_path(phi, geom)?;
    let gt = g_tilde(&base, kg);
    let c_of_phi = if phi == 0.0 {
        gt / geom.c_gamma.sqrt()
    } else {
        gt * base.u / base.h_prime
    };
    Ok(PathPoint {
        phi,
        r: base.r,
        r_prime: base.r_prime,
        u: base.u,
        h: base.h,
        h_prime: base.h_prime,
        g_tilde: gt,
        c_of_phi,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{kind_geometry, make_threshold, validity_window, ChannelParams, Kind};
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn setup(om: f64, frac: f64) -> (ChannelParams, ThresholdGeometry) {
        let params = ChannelParams::new(om).unwrap();
        let (lo, hi) = validity_window(&params);
        let g = make_threshold(lo + frac * (hi - lo), &params).unwrap();
        (params, g)
    }

    /// Path quantities straight from the textbook formulas.
    fn naive(phi: f64, g: &ThresholdGeometry, theta: f64) -> (f64, f64, f64, f64) {
        let s = g.s_gamma;
        let sinc = phi.sin() / phi;
        let r = (s / sinc).asinh();
        let rp = (1.0 / phi - 1.0 / phi.tan()) / (1.0 + sinc * sinc / (s * s)).sqrt();
        let e = (theta - r).exp();
        let gt = (e * (phi.cos() + rp * phi.sin()) - 1.0) / (e * e - 2.0 * phi.cos() * e + 1.0);
        let h = (1.0 - phi.cos()) * r.cosh() + g.c_gamma - r.cosh() + s * (r - g.gamma);
        (r, rp, gt, h)
    }

    #[test]
    fn limits_at_origin() {
        let (params, g) = setup(1.0, 0.5);
        for kind in Kind::BOTH {
            let kg = kind_geometry(&g, &params, kind);
            let p = path_point(0.0, &g, &kg).unwrap();
            assert_eq!((p.r, p.r_prime, p.u, p.h), (g.gamma, 0.0, 0.0, 0.0));
            assert_eq!(p.g_tilde, 1.0 / (kg.theta - g.gamma).exp_m1());
            let c0 = 1.0 / (g.c_gamma.sqrt() * (kg.theta - g.gamma).exp_m1());
            assert!((p.c_of_phi / c0 - 1.0).abs() < 1e-15);
            // continuity into the interior
            let q = path_point(1e-7, &g, &kg).unwrap();
            assert!((q.c_of_phi / p.c_of_phi - 1.0).abs() < 1e-10);
            assert!((q.g_tilde / p.g_tilde - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn agrees_with_direct_formulas_away_from_origin() {
        let (params, g) = setup(1.0, 0.3);
        let kg = kind_geometry(&g, &params, Kind::Fa);
        for phi in [0.5, 1.0, 2.0, 3.0] {
            let p = path_point(phi, &g, &kg).unwrap();
            let (r, rp, gt, h) = naive(phi, &g, kg.theta);
            assert!((p.r - r).abs() < 1e-13 * r);
            assert!((p.r_prime - rp).abs() < 1e-12 * rp);
            assert!((p.g_tilde - gt).abs() < 1e-12 * gt.abs());
            assert!((p.h - h).abs() < 1e-12 * h);
        }
    }

    #[test]
    fn small_angle_forms_stay_accurate() {
        // r' ≈ φ/(3√(1+1/s²)), h ≈ c φ²/2 for tiny φ
        let (_, g) = setup(1.0, 0.5);
        let phi = 1e-5;
        let b = descent_path(phi, &g).unwrap();
        let rp = phi / 3.0 / (1.0 + 1.0 / g.s_gamma.powi(2)).sqrt();
        assert!((b.r_prime / rp - 1.0).abs() < 1e-9);
        assert!((b.h / (g.c_gamma * phi * phi / 2.0) - 1.0).abs() < 1e-9);
        assert!((b.r_minus_gamma / (g.t_gamma * phi * phi / 6.0) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn u_matches_complex_alpha() {
        let (params, g) = setup(1.0, 0.5);
        let kg = kind_geometry(&g, &params, Kind::Md);
        let phi = std::f64::consts::FRAC_PI_2;
        let p = path_point(phi, &g, &kg).unwrap();
        let z = Complex64::new(p.r, phi);
        let a = g.c_gamma - z.cosh() + g.s_gamma * (z - g.gamma);
        assert!(a.im.abs() < 1e-13);
        let u = (2.0 * a).sqrt();
        assert!((u.re - p.u).abs() < 1e-13 && u.im.abs() < 1e-7);
    }

    #[test]
    fn rejects_angles_outside_range() {
        let (_, g) = setup(1.0, 0.5);
        assert!(descent_path(-0.1, &g).is_err());
        assert!(descent_path(PI, &g).is_err());
    }

    #[test]
    fn h_is_monotone_on_dense_grids() {
        for gamma in [0.01, 0.5, 3.0] {
            let params = ChannelParams::new(1.0).unwrap();
            let g = make_threshold(gamma, &params).unwrap();
            let mut last = 0.0;
            for i in 0..4000 {
                let phi = PI * i as f64 / 4000.0;
                let b = descent_path(phi, &g).unwrap();
                assert!(b.h >= last, "gamma={gamma} phi={phi}");
                last = b.h;
            }
        }
    }

    proptest! {
        #[test]
        fn dm8_bracket_holds(gamma in 1e-3f64..4.0, phi in 0.0f64..3.14) {
            let g = make_threshold(gamma, &ChannelParams::new(1.0).unwrap()).unwrap();
            let b = descent_path(phi, &g).unwrap();
            let mid = b.r_minus_gamma.exp() * b.sinc;
            let lower = 1.0 - (g.c_gamma - g.s_gamma) / (g.c_gamma + g.s_gamma) * (1.0 - b.sinc * b.sinc);
            prop_assert!(lower <= mid * (1.0 + 1e-14));
            prop_assert!(mid <= 1.0 + 1e-14);
        }
    }
}
