use num_complex::Complex64;

use super::compose_series_power;
use crate::error::{domain, Result};
use crate::temme::ThresholdGeometry;

/// The coefficient pipeline carried out literally in complex arithmetic,
/// with no parity bookkeeping and no rescaling. Slow and prone to overflow
/// for large `γ`; it exists to cross-check [`super::build_coefficients`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTables {
    pub beta: Vec<Complex64>,
    pub t: Vec<Complex64>,
    pub xi: Vec<Complex64>,
    /// `p[j][n] = P_{j,n}`.
    pub p: Vec<Vec<Complex64>>,
    pub s: Vec<Vec<Complex64>>,
    /// `c_n = f_n / i` for every `n`, odd ones included.
    pub c: Vec<Complex64>,
}

pub fn complex_reference(geom: &ThresholdGeometry, theta: f64, k: usize) -> Result<ComplexTables> {
    if k == 0 {
        return Err(domain("coefficient count", 0.0));
    }
    let cx = |v: f64| Complex64::new(v, 0.0);
    let zero = cx(0.0);
    let gamma = geom.gamma;
    let order = 2 * k;

    let mut alpha = vec![zero; order + 1];
    let mut fact = 1.0;
    for (m, a) in alpha.iter_mut().enumerate().skip(1) {
        fact *= m as f64;
        if m >= 2 {
            *a = cx(-(if m % 2 == 0 { geom.c_gamma } else { geom.s_gamma }) / fact);
        }
    }
    let log_inner: Vec<Complex64> =
        (0..=order).map(|m| cx(if m % 2 == 0 { 1.0 } else { -1.0 } / (m + 1) as f64)).collect();
    let mut nu = vec![zero; order + 1];
    for j in 2..=order {
        let q = compose_series_power(&log_inner, j, order - j)?;
        for m in j..=order {
            nu[m] += alpha[j] * q[m - j];
        }
    }
    for (m, v) in nu.iter_mut().enumerate() {
        *v *= (-(m as f64) * gamma).exp();
    }

    let nb = order;
    let mut beta = vec![zero; nb];
    // principal root of a negative real: keep the zero imaginary part positive
    let two_nu2 = 2.0 * nu[2];
    beta[1] = -Complex64::new(two_nu2.re, two_nu2.im.abs()).sqrt();
    for m in 2..nb {
        let mut conv = zero;
        for q in 2..m {
            conv += beta[q] * beta[m + 1 - q];
        }
        beta[m] = (nu[m + 1] - 0.5 * conv) / beta[1];
    }

    let mut p = vec![vec![zero; nb]; nb];
    for j in 1..nb {
        let pw = compose_series_power(&beta[1..], j, nb - 1 - j)?;
        p[j][j..].copy_from_slice(&pw);
    }
    let mut t = vec![zero; nb];
    t[0] = cx(gamma.exp());
    t[1] = beta[1].inv();
    for m in 2..nb {
        let mut acc = zero;
        for j in 1..m {
            acc += t[j] * p[j][m];
        }
        t[m] = -acc / beta[1].powu(m as u32);
    }

    let nx = order - 1;
    let mut s = vec![vec![zero; nx]; nx];
    for j in 1..nx {
        let pw = compose_series_power(&t[1..], j, nx - 1 - j)?;
        s[j][j..].copy_from_slice(&pw);
    }
    let d = cx(theta.exp() - gamma.exp());
    let mut xi = vec![zero; nx];
    xi[0] = d.inv();
    for m in 1..nx {
        for j in 1..=m {
            xi[m] += s[j][m] / d.powu(j as u32 + 1);
        }
    }

    let i = Complex64::new(0.0, 1.0);
    let c = (0..nx)
        .map(|m| {
            let mut f = zero;
            for q in 0..=m {
                f += (q + 1) as f64 * t[q + 1] * xi[m - q];
            }
            f / i
        })
        .collect();
    Ok(ComplexTables { beta, t, xi, p, s, c })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::build_coefficients;
    use crate::temme::{kind_geometry, make_threshold, validity_window, ChannelParams, Kind};

    fn close(a: Complex64, b: Complex64, rel: f64) -> bool {
        (a - b).norm() <= rel * b.norm().max(1e-300)
    }

    #[test]
    fn parity_storage_matches_complex_pipeline() {
        for om in [0.5, 1.0, 3.0] {
            let params = ChannelParams::new(om).unwrap();
            let (lo, hi) = validity_window(&params);
            for f in [0.2, 0.6] {
                let g = make_threshold(lo + f * (hi - lo), &params).unwrap();
                for kind in Kind::BOTH {
                    let kg = kind_geometry(&g, &params, kind);
                    let k = 12;
                    let real = build_coefficients(&g, kg.theta, k).unwrap();
                    let cplx = complex_reference(&g, kg.theta, k).unwrap();
                    // reversion loses digits geometrically with the index
                    let tol = |n: usize| 1e-12 * 4f64.powi(n as i32);
                    for n in 0..real.beta.len() {
                        assert!(close(real.beta(n), cplx.beta[n], tol(n)), "beta {n}");
                        assert!(close(real.t(n), cplx.t[n], tol(n)), "t {n}: {} vs {}", real.t(n), cplx.t[n]);
                    }
                    for n in 0..real.xi.len() {
                        assert!(close(real.xi(n), cplx.xi[n], tol(n)), "xi {n}");
                    }
                    for j in 1..6 {
                        for n in j..real.p_table.len() {
                            assert!(close(real.p(j, n), cplx.p[j][n], tol(n)), "P {j},{n}");
                        }
                        for n in j..real.s_table.len() {
                            assert!(close(real.s(j, n), cplx.s[j][n], tol(n)), "S {j},{n}: {} vs {}", real.s(j, n), cplx.s[j][n]);
                        }
                    }
                    for (kk, ce) in real.c_even.iter().enumerate() {
                        let z = cplx.c[2 * kk];
                        assert!(z.im.abs() <= 1e-14 * z.norm() + 1e-300, "residue {kk}: {z}");
                        let err = real.c_even_error[kk];
                        assert!((ce - z.re).abs() <= 4.0 * err + 1e-12 * 4f64.powi(kk as i32) * ce.abs(), "c {kk}: {ce} vs {}", z.re);
                    }
                }
            }
        }
    }
}
