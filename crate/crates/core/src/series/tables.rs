use num_complex::Complex64;

use super::{compose_series_power, series_powi};
use crate::error::{domain, Error, Result};
use crate::temme::ThresholdGeometry;

/// Hard cap on the number of even coefficients.
pub const MAX_TERMS: usize = 32;
/// The series is refused when `|e^{θ-γ} - 1|` falls below this.
pub const POLE_GUARD: f64 = 1e-8;

/// The coefficient pipeline `α_n → ν_n → β_n → t_n → ξ_n → c_{2k}`.
///
/// Coefficients that are real or purely imaginary according to index parity
/// are stored as a real payload: the actual value is `payload · i^p` with
/// `p = n mod 2` (for `P_{j,n}`, `p = j mod 2`; `β_n` is always `i · beta[n]`).
/// Use the accessor methods to get them as complex numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTables {
    pub k_max: usize,
    pub gamma: f64,
    pub theta: f64,
    pub alpha_taylor: Vec<f64>,
    /// `q_table[j][n] = Q_{j,n}`, zero for `n < j`.
    pub q_table: Vec<Vec<f64>>,
    pub nu: Vec<f64>,
    pub beta: Vec<f64>,
    pub t_coeffs: Vec<f64>,
    pub p_table: Vec<Vec<f64>>,
    pub s_table: Vec<Vec<f64>>,
    pub xi: Vec<f64>,
    /// `c_{2k}`, taken from the better-conditioned Lagrange-inversion route.
    pub c_even: Vec<f64>,
    /// Absolute error estimate for each `c_{2k}`: the disagreement between the
    /// two independent reversion routes plus a few ulps.
    pub c_even_error: Vec<f64>,
}

fn i_pow(p: usize) -> Complex64 {
    match p % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `(-1)^{⌈n/2⌉}`: converts `(-i)^n x` to a parity payload.
fn ceil_half_sign(n: usize) -> f64 {
    if n.div_ceil(2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl CoefficientTables {
    pub fn beta(&self, n: usize) -> Complex64 {
        Complex64::new(0.0, self.beta[n])
    }

    pub fn t(&self, n: usize) -> Complex64 {
        self.t_coeffs[n] * i_pow(n % 2)
    }

    pub fn xi(&self, n: usize) -> Complex64 {
        self.xi[n] * i_pow(n % 2)
    }

    pub fn p(&self, j: usize, n: usize) -> Complex64 {
        self.p_table[j][n] * i_pow(j % 2)
    }

    pub fn s(&self, j: usize, n: usize) -> Complex64 {
        self.s_table[j][n] * i_pow(n % 2)
    }

    /// Highest Taylor index carried by the `α`, `ν` and `Q` tables.
    pub fn order(&self) -> usize {
        self.alpha_taylor.len() - 1
    }

    /// Number of leading coefficients whose estimated relative error is at most `rel`.
    pub fn reliable_terms(&self, rel: f64) -> usize {
        self.c_even
            .iter()
            .zip(&self.c_even_error)
            .take_while(|(c, e)| **e <= rel * c.abs())
            .count()
    }
}

/// Runs the pipeline for `k` even coefficients `c_0, c_2, ..., c_{2k-2}`.
///
/// Internally everything is expanded in `p' = (x - e^γ) e^{-γ}`, which removes
/// every `e^{±nγ}` factor from the recursions; `c_{2k}` is invariant under
/// that rescaling. The stored intermediate tables are converted back to the
/// expansion in `x - e^γ`.
pub fn build_coefficients(geom: &ThresholdGeometry, theta: f64, k: usize) -> Result<CoefficientTables> {
    if k == 0 || k > MAX_TERMS {
        return Err(domain("coefficient count", k as f64));
    }
    let gamma = geom.gamma;
    let dist = (theta - gamma).exp_m1();
    if !(dist.abs() >= POLE_GUARD) {
        return Err(Error::Pole { distance: dist.abs() });
    }
    let s = geom.s_gamma;
    let c = geom.c_gamma;
    let order = 2 * k;

    // α_n: Taylor coefficients of α at γ
    let mut alpha_taylor = vec![0.0; order + 1];
    let mut fact = 1.0;
    for (m, a) in alpha_taylor.iter_mut().enumerate().skip(1) {
        fact *= m as f64;
        if m >= 2 {
            *a = -(if m % 2 == 0 { c } else { s }) / fact;
        }
    }

    // Q_{j,n} = [ε^n] ln(1+ε)^j
    let log_inner: Vec<f64> =
        (0..=order).map(|m| if m % 2 == 0 { 1.0 } else { -1.0 } / (m + 1) as f64).collect();
    let mut q_table = vec![vec![0.0; order + 1]; order + 1];
    for j in 1..=order {
        let pw = compose_series_power(&log_inner, j, order - j)?;
        q_table[j][j..].copy_from_slice(&pw);
    }

    // ν'_n = Σ_j α_j Q_{j,n}  (ν_n = e^{-nγ} ν'_n)
    let mut nu_s = vec![0.0; order + 1];
    for m in 2..=order {
        nu_s[m] = (2..=m).map(|j| alpha_taylor[j] * q_table[j][m]).sum();
    }

    // b'_n with β_n = i e^{-nγ} b'_n; ν' = -½ (Σ b' p'^n)²
    let nb = order; // indices 0..order-1
    let mut b = vec![0.0; nb];
    b[1] = -(-2.0 * nu_s[2]).sqrt();
    for m in 2..nb {
        let conv: f64 = (2..m).map(|q| b[q] * b[m + 1 - q]).sum();
        b[m] = -(nu_s[m + 1] + 0.5 * conv) / b[1];
    }

    // B'_{j,n} = [p'^n] (Σ b' p'^m)^j
    let mut bp = vec![vec![0.0; nb]; nb];
    for j in 1..nb {
        let pw = compose_series_power(&b[1..], j, nb - 1 - j)?;
        bp[j][j..].copy_from_slice(&pw);
    }

    // reversion: p' = Σ τ'_n w^n
    let mut tau = vec![0.0; nb];
    tau[1] = 1.0 / b[1];
    for m in 2..nb {
        let acc: f64 = (1..m).map(|j| tau[j] * bp[j][m]).sum();
        tau[m] = -acc / b[1].powi(m as i32);
    }

    // S'_{j,n} = [w^n] (Σ τ' w^m)^j and X'_n = [w^n] 1/(D' - p'(w))
    let nx = order - 1; // indices 0..order-2
    let mut sp = vec![vec![0.0; nx]; nx];
    for j in 1..nx {
        let pw = compose_series_power(&tau[1..], j, nx - 1 - j)?;
        sp[j][j..].copy_from_slice(&pw);
    }
    let mut x = vec![0.0; nx];
    x[0] = 1.0 / dist;
    for m in 1..nx {
        let mut acc = 0.0;
        let mut dpow = 1.0 / dist;
        for row in sp.iter().take(m + 1).skip(1) {
            dpow /= dist;
            acc += dpow * row[m];
        }
        x[m] = acc;
    }

    // F_m = Σ (k+1) τ'_{k+1} X'_{m-k};  c_{2k} = (-1)^{k+1} F_{2k}
    let c_from = |tau: &[f64], x: &[f64]| -> Vec<f64> {
        (0..k)
            .map(|kk| {
                let m = 2 * kk;
                let f: f64 = (0..=m).map(|q| (q + 1) as f64 * tau[q + 1] * x[m - q]).sum();
                if kk % 2 == 0 {
                    -f
                } else {
                    f
                }
            })
            .collect()
    };
    let c_recursive = c_from(&tau, &x);

    // Independent route: Lagrange inversion τ'_n = (1/n) [p'^{n-1}] (b'(p')/p')^{-n}
    // and X' as one reciprocal series. Its rounding differs from the
    // triangular recursions, so the disagreement estimates the error.
    let mut tau_l = vec![0.0; nb];
    for m in 1..nb {
        tau_l[m] = series_powi(&b[1..], -(m as i32), m - 1)?[m - 1] / m as f64;
    }
    let mut denom = vec![dist];
    denom.extend(tau_l[1..nx].iter().map(|t| -t));
    let x_l = series_powi(&denom, -1, nx - 1)?;
    let c_even = c_from(&tau_l, &x_l);
    let mut c_even_error = Vec::with_capacity(k);
    for (kk, (a, b)) in c_even.iter().zip(&c_recursive).enumerate() {
        if !a.is_finite() {
            return Err(Error::NonFinite { index: kk });
        }
        c_even_error.push((a - b).abs() + 4.0 * f64::EPSILON * a.abs());
    }

    // back to the unscaled expansion, in parity-payload form
    let eg = gamma.exp();
    let nu: Vec<f64> = nu_s.iter().enumerate().map(|(m, v)| v * (-(m as f64) * gamma).exp()).collect();
    let beta: Vec<f64> = b.iter().enumerate().map(|(m, v)| v * (-(m as f64) * gamma).exp()).collect();
    let mut t_coeffs = vec![eg; nb];
    for m in 1..nb {
        t_coeffs[m] = ceil_half_sign(m) * eg * tau[m];
    }
    let mut p_table = vec![vec![0.0; nb]; nb];
    for j in 1..nb {
        let sign = if (j / 2) % 2 == 0 { 1.0 } else { -1.0 };
        for m in j..nb {
            p_table[j][m] = sign * bp[j][m] * (-(m as f64) * gamma).exp();
        }
    }
    let mut s_table = vec![vec![0.0; nx]; nx];
    for j in 1..nx {
        for m in j..nx {
            s_table[j][m] = ceil_half_sign(m) * sp[j][m] * (j as f64 * gamma).exp();
        }
    }
    let xi: Vec<f64> = x.iter().enumerate().map(|(m, v)| ceil_half_sign(m) * v / eg).collect();

    Ok(CoefficientTables {
        k_max: k,
        gamma,
        theta,
        alpha_taylor,
        q_table,
        nu,
        beta,
        t_coeffs,
        p_table,
        s_table,
        xi,
        c_even,
        c_even_error,
    })
}
